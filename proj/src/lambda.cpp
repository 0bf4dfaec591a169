#include "lvar/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lvar {

double LambdaFunction::max_lambda() const {
    double m = 0.0;
    for (const auto& b : breakpoints) m = std::max(m, b.lambda);
    return m;
}

double LambdaFunction::min_lambda() const {
    double m = 1.0;
    for (const auto& b : breakpoints) m = std::min(m, b.lambda);
    return m;
}

void LambdaFunction::validate() const {
    if (breakpoints.empty()) throw std::invalid_argument("LambdaFunction: no breakpoints");
    for (const auto& b : breakpoints)
        if (!(b.lambda > 0.0 && b.lambda < 1.0) || !std::isfinite(b.x))
            throw std::invalid_argument("LambdaFunction: breakpoint out of range");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i - 1].x < breakpoints[i].x))
            throw std::invalid_argument("LambdaFunction: x levels not strictly increasing");
        bool up = breakpoints[i].lambda >= breakpoints[i - 1].lambda;
        bool down = breakpoints[i].lambda <= breakpoints[i - 1].lambda;
        if (direction == LambdaDirection::increasing ? !up : !down)
            throw std::invalid_argument("LambdaFunction: lambda levels not monotone");
    }
}

LambdaFunction LambdaFunction::constant(double lambda) {
    LambdaFunction f;
    f.breakpoints = {{0.0, lambda}};
    return f;
}

double eval_lambda(const LambdaFunction& f, double x) {
    const auto& bp = f.breakpoints;
    if (bp.empty()) throw std::invalid_argument("eval_lambda: empty function");
    if (x <= bp.front().x) return bp.front().lambda;
    if (x >= bp.back().x) return bp.back().lambda;
    auto it = std::upper_bound(bp.begin(), bp.end(), x,
                               [](double v, const LambdaFunction::Breakpoint& b) { return v < b.x; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double w = (x - lo.x) / (hi.x - lo.x);
    return lo.lambda + w * (hi.lambda - lo.lambda);
}

void LambdaConfig::validate() const {
    if (!(lambda_min > 0.0 && lambda_min <= lambda_max && lambda_max < 1.0))
        throw std::invalid_argument("LambdaConfig: need 0 < lambda_min <= lambda_max < 1");
    if (n_points < 2 && lambda_min != lambda_max)
        throw std::invalid_argument("LambdaConfig: n_points must be >= 2");
    if (!(benchmark_var_level > 0.0 && benchmark_var_level < 1.0))
        throw std::invalid_argument("LambdaConfig: benchmark_var_level outside (0,1)");
    if (equipartition_parts < 2) throw std::invalid_argument("LambdaConfig: equipartition_parts < 2");
}

void BenchmarkPanel::validate() const {
    if (series.empty()) throw std::invalid_argument("BenchmarkPanel: no benchmarks");
    for (const auto& s : series) {
        s.validate();
        if (s.size() != length())
            throw std::invalid_argument("BenchmarkPanel: series lengths differ");
    }
}

namespace {

// -VaR of the empirical window at the given level: the first order statistic
// whose step-CDF strictly exceeds it.
double empirical_var_return(std::vector<double>& window, double level) {
    std::sort(window.begin(), window.end());
    int w = static_cast<int>(window.size());
    int k = static_cast<int>(std::floor(level * w)) + 1;  // first k with k/w > level
    k = std::min(k, w);
    return window[k - 1];
}

}  // namespace

LambdaFunction calibrate_lambda(const BenchmarkPanel& panel, const LambdaConfig& cfg,
                                int first, int last) {
    cfg.validate();
    panel.validate();
    if (first < 0 || last >= panel.length() || first > last)
        throw std::invalid_argument("calibrate_lambda: window outside panel");

    if (cfg.lambda_min == cfg.lambda_max) {
        auto f = LambdaFunction::constant(cfg.lambda_max);
        f.direction = cfg.direction;
        return f;
    }

    double pi1 = std::numeric_limits<double>::infinity();
    std::vector<double> var_returns;
    var_returns.reserve(panel.n_benchmarks());
    for (const auto& s : panel.series) {
        std::vector<double> window(s.values.data() + first, s.values.data() + last + 1);
        pi1 = std::min(pi1, *std::min_element(window.begin(), window.end()));
        var_returns.push_back(empirical_var_return(window, cfg.benchmark_var_level));
    }
    double pi2 = *std::min_element(var_returns.begin(), var_returns.end());
    double pi4 = *std::max_element(var_returns.begin(), var_returns.end());
    double pi3 = std::accumulate(var_returns.begin(), var_returns.end(), 0.0) /
                 static_cast<double>(var_returns.size());

    std::vector<double> pis = {pi1, pi2, pi3, pi4};
    bool repaired = !std::is_sorted(pis.begin(), pis.end());
    if (repaired) std::sort(pis.begin(), pis.end());

    // Ascending probability levels: lambda_min, then the interior points of the
    // equipartition of (0, lambda_max], then lambda_max.
    std::vector<double> lambdas(4);
    lambdas[0] = cfg.lambda_min;
    lambdas[3] = cfg.lambda_max;
    for (int i = 1; i <= 2; ++i) {
        double l = (i + 1) * cfg.lambda_max / cfg.equipartition_parts;
        lambdas[i] = std::clamp(l, cfg.lambda_min, cfg.lambda_max);
    }
    if (cfg.direction == LambdaDirection::decreasing)
        std::reverse(lambdas.begin(), lambdas.end());

    LambdaFunction f;
    f.direction = cfg.direction;
    f.order_repaired = repaired;
    for (int i = 0; i < 4; ++i) {
        if (!f.breakpoints.empty() && f.breakpoints.back().x == pis[i]) {
            f.breakpoints.back().lambda = lambdas[i];  // keep the later pairing at a shared x
        } else {
            f.breakpoints.push_back({pis[i], lambdas[i]});
        }
    }
    if (f.breakpoints.size() == 1) {
        f = LambdaFunction::constant(cfg.lambda_max);
        f.direction = cfg.direction;
        f.degenerate = true;
        return f;
    }
    f.validate();
    return f;
}

}  // namespace lvar
