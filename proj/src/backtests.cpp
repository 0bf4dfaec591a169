#include "lvar/backtests.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lvar/poisson_binomial.hpp"
#include "lvar/special.hpp"

namespace lvar {

int HitSequence::n_violations() const {
    return std::accumulate(hits.begin(), hits.end(), 0);
}

void HitSequence::validate() const {
    if (hits.size() != coverage.size())
        throw std::invalid_argument("HitSequence: hits/coverage length mismatch");
    if (hits.empty()) throw std::invalid_argument("HitSequence: empty");
    for (std::size_t t = 0; t < hits.size(); ++t) {
        if (hits[t] != 0 && hits[t] != 1) throw std::invalid_argument("HitSequence: hit not 0/1");
        if (!(coverage[t] > 0.0 && coverage[t] < 1.0))
            throw std::invalid_argument("HitSequence: coverage outside (0,1)");
    }
}

std::string to_string(TestId id) {
    switch (id) {
        case TestId::test1: return "test1";
        case TestId::test2: return "test2";
        case TestId::test3: return "test3";
        case TestId::kupiec_pof: return "kupiec_pof";
        case TestId::kupiec_lambda: return "kupiec_lambda";
    }
    return "unknown";
}

HitSequence hit_sequence(const Vector& realized, const std::vector<RiskForecast>& forecasts) {
    if (static_cast<std::size_t>(realized.size()) != forecasts.size())
        throw std::invalid_argument("hit_sequence: misaligned inputs");
    HitSequence h;
    h.hits.reserve(forecasts.size());
    h.coverage.reserve(forecasts.size());
    h.flags.reserve(forecasts.size());
    for (std::size_t t = 0; t < forecasts.size(); ++t) {
        h.hits.push_back(realized[static_cast<int>(t)] < forecasts[t].threshold_return ? 1 : 0);
        h.coverage.push_back(forecasts[t].coverage_prob);
        h.flags.push_back(forecasts[t].coverage_clamped ? 1 : 0);
    }
    h.validate();
    return h;
}

namespace {

Eigen::VectorXd coverage_vector(const HitSequence& h) {
    return Eigen::Map<const Eigen::VectorXd>(h.coverage.data(), static_cast<int>(h.coverage.size()));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha outside (0,1)");
}

}  // namespace

TestReport test1_coverage(const HitSequence& h, double alpha) {
    check_alpha(alpha);
    h.validate();
    PoissonBinomial pb(coverage_vector(h));
    const int z1 = h.n_violations();
    TestReport r;
    r.test_id = TestId::test1;
    r.statistic = static_cast<double>(z1);
    r.alpha = alpha;
    r.n_violations = z1;
    r.horizon = h.length();
    double cdf = pb.cdf(z1);
    r.verdict = cdf > 1.0 - alpha ? Verdict::reject : Verdict::accept;
    r.p_value = 1.0 - cdf + pb.pmf()[z1];  // upper-tail P(Z1 >= z1)
    r.critical_lo = pb.quantile(alpha / 2.0);
    r.critical_hi = pb.quantile(1.0 - alpha / 2.0);
    return r;
}

TestReport test2_asymptotic(const HitSequence& h, double alpha) {
    check_alpha(alpha);
    h.validate();
    double num = 0.0, var = 0.0;
    for (int t = 0; t < h.length(); ++t) {
        num += h.hits[t] - h.coverage[t];
        var += h.coverage[t] * (1.0 - h.coverage[t]);
    }
    if (!(var > 0.0)) throw std::invalid_argument("test2_asymptotic: zero variance denominator");
    double z2 = num / std::sqrt(var);
    TestReport r;
    r.test_id = TestId::test2;
    r.statistic = z2;
    r.alpha = alpha;
    r.n_violations = h.n_violations();
    r.horizon = h.length();
    r.p_value = 2.0 * (1.0 - std_normal_cdf(std::fabs(z2)));
    double crit = std_normal_quantile(1.0 - alpha / 2.0);
    r.verdict = std::fabs(z2) > crit ? Verdict::reject : Verdict::accept;
    return r;
}

TestReport test3_simulation(const HitSequence& h,
                            const std::vector<PredictiveDistribution>& stored_models,
                            const std::vector<RiskForecast>& forecasts, int m_sims,
                            double alpha, std::uint64_t seed) {
    check_alpha(alpha);
    h.validate();
    const int T = h.length();
    if (static_cast<int>(stored_models.size()) != T || static_cast<int>(forecasts.size()) != T)
        throw std::invalid_argument("test3_simulation: missing stored model or forecast");
    if (m_sims < 1000) throw std::invalid_argument("test3_simulation: need M >= 1000");

    double sum_cov = 0.0;
    for (double c : h.coverage) sum_cov += c;
    const double z3 = (sum_cov - h.n_violations()) / T;

    int n_leq = 0;
    for (int m = 0; m < m_sims; ++m) {
        // Per-scenario stream so results are independent of evaluation order.
        Rng rng(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(m + 1));
        int count = 0;
        for (int t = 0; t < T; ++t)
            if (stored_models[t].sample(rng) < forecasts[t].threshold_return) ++count;
        double z3m = (sum_cov - count) / T;
        if (z3m <= z3) ++n_leq;
    }
    TestReport r;
    r.test_id = TestId::test3;
    r.statistic = z3;
    r.alpha = alpha;
    r.n_violations = h.n_violations();
    r.horizon = T;
    r.p_value = (1.0 + n_leq) / (m_sims + 1.0);
    r.verdict = *r.p_value < alpha ? Verdict::reject : Verdict::accept;
    return r;
}

TestReport kupiec_pof(int n_violations, int horizon, double lambda0, double alpha) {
    check_alpha(alpha);
    if (n_violations < 0 || n_violations > horizon)
        throw std::invalid_argument("kupiec_pof: n outside [0,T]");
    if (!(lambda0 > 0.0 && lambda0 < 1.0))
        throw std::invalid_argument("kupiec_pof: lambda0 outside (0,1)");
    const double n = n_violations, T = horizon;
    const double phat = n / T;
    auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
    // Ratio form so the statistic is exactly zero when phat == lambda0.
    double lr = 2.0 * (xlogy(n, phat / lambda0) + xlogy(T - n, (1.0 - phat) / (1.0 - lambda0)));
    TestReport r;
    r.test_id = TestId::kupiec_pof;
    r.statistic = lr;
    r.alpha = alpha;
    r.n_violations = n_violations;
    r.horizon = horizon;
    r.p_value = 1.0 - chi2_1_cdf(lr);
    if (phat <= lambda0) {
        r.verdict = Verdict::accept;  // unilateral: over-coverage never rejects
    } else {
        r.verdict = lr > chi2_1_quantile(1.0 - alpha) ? Verdict::reject : Verdict::accept;
    }
    return r;
}

TestReport kupiec_lambda(int n_violations, int horizon, const LambdaFunction& f, double alpha) {
    TestReport r = kupiec_pof(n_violations, horizon, f.max_lambda(), alpha);
    r.test_id = TestId::kupiec_lambda;
    return r;
}

}  // namespace lvar
