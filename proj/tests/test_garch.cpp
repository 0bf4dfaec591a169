#include <doctest.h>

#include <cmath>

#include "lvar/distributions.hpp"
#include "lvar/engine.hpp"

using namespace lvar;

TEST_CASE("iid gaussian input yields weak arch effects") {
    const double sigma = 0.01;
    auto series = gen_synthetic(GeneratorId::iid_gaussian, {.sigma = sigma}, 500, 101);
    auto d = fit_garch_t(series.values);
    const auto& p = std::get<GarchTParams>(d.params());
    CHECK(p.alpha + p.beta < 0.999);
    CHECK(p.alpha + p.beta >= 0.0);
    CHECK(p.alpha < 0.3);
    double uncond = p.omega / (1.0 - p.alpha - p.beta);
    CHECK(uncond == doctest::Approx(sigma * sigma).epsilon(0.25));
}

TEST_CASE("parameter recovery on simulated garch data") {
    SyntheticParams sp;
    sp.omega = 1e-6;
    sp.alpha = 0.08;
    sp.beta = 0.90;
    sp.nu = 6.0;
    auto series = gen_synthetic(GeneratorId::garch_t, sp, 2000, 7);
    auto d = fit_garch_t(series.values);
    const auto& p = std::get<GarchTParams>(d.params());
    CHECK(std::fabs(p.alpha - 0.08) < 0.06);
    CHECK(std::fabs(p.beta - 0.90) < 0.06);
    CHECK(p.nu > 2.5);
    CHECK(p.sigma2_next > 0.0);
}

TEST_CASE("constant window is rejected") {
    Vector w = Vector::Constant(500, 0.001);
    CHECK_THROWS_AS(fit_garch_t(w), std::invalid_argument);
    CHECK_THROWS_AS(fit_garch_t(Vector::Zero(50)), std::invalid_argument);
}

TEST_CASE("variance recursion stays positive") {
    GarchTParams p{1e-8, 0.2, 0.79, 4.0, 1e-4};
    double sigma2 = 1e-4;
    for (double r : {1e6, -1e6, 0.0, 1e-12}) {
        sigma2 = p.omega + p.alpha * r * r + p.beta * sigma2;
        CHECK(sigma2 > 0.0);
    }
}

TEST_CASE("warm start reaches the same likelihood") {
    auto series = gen_synthetic(GeneratorId::garch_t, {}, 500, 13);
    auto cold = fit_garch_t(series.values);
    const auto& pc = std::get<GarchTParams>(cold.params());
    GarchFitOptions opts;
    opts.warm_start = &pc;
    auto warm = fit_garch_t(series.values, opts);
    const auto& pw = std::get<GarchTParams>(warm.params());
    double nll_cold = garch_t_neg_loglik(series.values, pc);
    double nll_warm = garch_t_neg_loglik(series.values, pw);
    CHECK(nll_warm <= nll_cold + 1e-6);
}
