#include "lvar/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lvar/special.hpp"

namespace lvar {

void ReturnSeries::validate() const {
    if (!dates.empty() && static_cast<int>(dates.size()) != size())
        throw std::invalid_argument("ReturnSeries: dates/values length mismatch");
    for (int i = 0; i + 1 < static_cast<int>(dates.size()); ++i)
        if (!(dates[i] < dates[i + 1]))
            throw std::invalid_argument("ReturnSeries: dates not strictly increasing");
    for (int i = 0; i < size(); ++i) {
        double v = values[i];
        if (!std::isfinite(v)) throw std::invalid_argument("ReturnSeries: non-finite value");
        if (v <= -1.0) throw std::invalid_argument("ReturnSeries: return <= -1");
    }
}

void GarchTParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("GarchTParams: omega must be > 0");
    if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("GarchTParams: negative arch/garch coefficient");
    if (!(alpha + beta < 1.0)) throw std::invalid_argument("GarchTParams: alpha + beta must be < 1");
    if (!(nu > 2.0)) throw std::invalid_argument("GarchTParams: nu must be > 2");
    if (!(sigma2_next > 0.0)) throw std::invalid_argument("GarchTParams: sigma2_next must be > 0");
}

namespace {

// Scale turning a unit-variance standardized t into a raw t_nu variate.
double t_scale(double nu) { return std::sqrt((nu - 2.0) / nu); }

struct CdfVisitor {
    double x;
    double operator()(const EmpiricalParams& p) const {
        const double* b = p.sorted_window.data();
        const double* e = b + p.sorted_window.size();
        auto it = std::upper_bound(b, e, x);
        return static_cast<double>(it - b) / static_cast<double>(p.sorted_window.size());
    }
    double operator()(const GaussianParams& p) const {
        return std_normal_cdf((x - p.mu) / p.sigma);
    }
    double operator()(const GarchTParams& p) const {
        double s = std::sqrt(p.sigma2_next) * t_scale(p.nu);
        return student_t_cdf(x / s, p.nu);
    }
};

struct CdfLeftVisitor {
    double x;
    double operator()(const EmpiricalParams& p) const {
        const double* b = p.sorted_window.data();
        const double* e = b + p.sorted_window.size();
        auto it = std::lower_bound(b, e, x);
        return static_cast<double>(it - b) / static_cast<double>(p.sorted_window.size());
    }
    double operator()(const GaussianParams& p) const { return CdfVisitor{x}(p); }
    double operator()(const GarchTParams& p) const { return CdfVisitor{x}(p); }
};

struct QuantileVisitor {
    double u;
    double operator()(const EmpiricalParams& p) const {
        int w = static_cast<int>(p.sorted_window.size());
        int k = static_cast<int>(std::ceil(u * w));
        k = std::clamp(k, 1, w);
        return p.sorted_window[k - 1];
    }
    double operator()(const GaussianParams& p) const {
        return p.mu + p.sigma * std_normal_quantile(u);
    }
    double operator()(const GarchTParams& p) const {
        double s = std::sqrt(p.sigma2_next) * t_scale(p.nu);
        return s * student_t_quantile(u, p.nu);
    }
};

struct SampleVisitor {
    Rng& rng;
    double operator()(const EmpiricalParams& p) const {
        std::uniform_int_distribution<int> idx(0, static_cast<int>(p.sorted_window.size()) - 1);
        return p.sorted_window[idx(rng)];
    }
    double operator()(const GaussianParams& p) const {
        std::normal_distribution<double> n(p.mu, p.sigma);
        return n(rng);
    }
    double operator()(const GarchTParams& p) const {
        std::student_t_distribution<double> t(p.nu);
        return std::sqrt(p.sigma2_next) * t_scale(p.nu) * t(rng);
    }
};

}  // namespace

PredictiveDistribution::PredictiveDistribution(ModelParams params) : params_(std::move(params)) {
    if (auto* g = std::get_if<GaussianParams>(&params_)) {
        if (!(g->sigma > 0.0)) throw std::invalid_argument("GaussianParams: sigma must be > 0");
    } else if (auto* t = std::get_if<GarchTParams>(&params_)) {
        t->validate();
    } else {
        auto& e = std::get<EmpiricalParams>(params_);
        if (e.sorted_window.size() < 2)
            throw std::invalid_argument("EmpiricalParams: window shorter than 2");
        if (!std::is_sorted(e.sorted_window.data(), e.sorted_window.data() + e.sorted_window.size()))
            throw std::invalid_argument("EmpiricalParams: window not sorted");
    }
}

double PredictiveDistribution::cdf(double x) const { return std::visit(CdfVisitor{x}, params_); }
double PredictiveDistribution::cdf_left(double x) const { return std::visit(CdfLeftVisitor{x}, params_); }

double PredictiveDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u outside (0,1)");
    return std::visit(QuantileVisitor{u}, params_);
}

double PredictiveDistribution::sample(Rng& rng) const { return std::visit(SampleVisitor{rng}, params_); }

PredictiveDistribution fit_empirical(const Vector& window) {
    if (window.size() < 2) throw std::invalid_argument("fit_empirical: window shorter than 2");
    for (int i = 0; i < window.size(); ++i)
        if (!std::isfinite(window[i])) throw std::invalid_argument("fit_empirical: non-finite value");
    EmpiricalParams p{window};
    std::sort(p.sorted_window.data(), p.sorted_window.data() + p.sorted_window.size());
    return PredictiveDistribution(std::move(p));
}

PredictiveDistribution fit_gaussian(const Vector& window) {
    int w = static_cast<int>(window.size());
    if (w < 2) throw std::invalid_argument("fit_gaussian: window shorter than 2");
    double mu = window.mean();
    double ss = (window.array() - mu).square().sum();
    double sigma = std::sqrt(ss / (w - 1));
    // Relative threshold: a constant window leaves rounding noise, not zero.
    double scale = std::sqrt(window.array().square().mean());
    if (!(sigma > 1e-7 * std::max(scale, 1e-30)))
        throw std::invalid_argument("fit_gaussian: zero-variance window");
    return PredictiveDistribution(GaussianParams{mu, sigma});
}

}  // namespace lvar
