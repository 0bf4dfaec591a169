#include "lvar/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lvar {

namespace {

double clamp_coverage(const PredictiveDistribution& dist, double cov, bool& clamped) {
    if (cov > 0.0) return cov;
    clamped = true;
    if (const auto* e = std::get_if<EmpiricalParams>(&dist.params()))
        return 1.0 / (10.0 * static_cast<double>(e->sorted_window.size()));
    return std::numeric_limits<double>::min();
}

double empirical_crossing(const EmpiricalParams& emp, const LambdaFunction& f) {
    const Vector& s = emp.sorted_window;
    const int w = static_cast<int>(s.size());
    for (int i = 0; i < w; ++i) {
        double c = static_cast<double>(i + 1) / w;  // cdf on [s[i], s[i+1])
        if (c > eval_lambda(f, s[i])) return s[i];
        if (i + 1 >= w) break;
        double right = s[i + 1];
        if (right == s[i]) continue;
        // Within the flat-cdf interval the condition can first hold where a
        // decreasing Lambda segment drops below c; solve each linear piece.
        double a = s[i];
        double la = eval_lambda(f, a);
        std::vector<double> cuts;
        for (const auto& bp : f.breakpoints)
            if (bp.x > a && bp.x < right) cuts.push_back(bp.x);
        cuts.push_back(right);
        for (double b : cuts) {
            double lb = eval_lambda(f, b);
            if (la >= c && lb < c) return a + (la - c) / (la - lb) * (b - a);
            a = b;
            la = lb;
        }
    }
    // cdf reaches 1 at the top sample and Lambda < 1 everywhere.
    return s[w - 1];
}

double continuous_crossing(const PredictiveDistribution& dist, const LambdaFunction& f) {
    const double lambda_max = f.max_lambda();
    // A constant function reduces to the plain quantile; keep that path exact.
    if (f.min_lambda() == lambda_max) return dist.quantile(lambda_max);
    double lo = dist.quantile(1e-12);
    double hi = dist.quantile(0.5 * (1.0 + lambda_max));
    auto g = [&](double x) { return dist.cdf(x) - eval_lambda(f, x); };

    std::vector<double> edges = {lo};
    for (const auto& bp : f.breakpoints)
        if (bp.x > lo && bp.x < hi) edges.push_back(bp.x);
    edges.push_back(hi);

    constexpr int kScan = 512;
    double prev_x = lo;
    double prev_g = g(lo);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double a = edges[e], b = edges[e + 1];
        for (int k = 1; k <= kScan; ++k) {
            double x = a + (b - a) * k / kScan;
            double gx = g(x);
            if (prev_g <= 0.0 && gx > 0.0) {
                double blo = prev_x, bhi = x;
                for (int it = 0; it < 200 && bhi - blo > 1e-15 * std::max(1.0, std::fabs(blo));
                     ++it) {
                    double mid = 0.5 * (blo + bhi);
                    if (g(mid) > 0.0)
                        bhi = mid;
                    else
                        blo = mid;
                }
                return 0.5 * (blo + bhi);
            }
            prev_x = x;
            prev_g = gx;
        }
    }
    return hi;
}

}  // namespace

RiskForecast var(const PredictiveDistribution& dist, double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("var: level outside (0,1)");
    double y;
    if (const auto* e = std::get_if<EmpiricalParams>(&dist.params())) {
        const Vector& s = e->sorted_window;
        int w = static_cast<int>(s.size());
        int k = static_cast<int>(std::floor(level * w)) + 1;  // first k with k/w > level
        k = std::min(k, w);
        y = s[k - 1];
    } else {
        y = dist.quantile(level);
    }
    RiskForecast fc;
    fc.threshold_return = y;
    fc.var_value = -y;
    fc.coverage_prob = clamp_coverage(dist, dist.cdf_left(y), fc.coverage_clamped);
    fc.lambda_at_threshold = level;
    return fc;
}

double solve_crossing(const PredictiveDistribution& dist, const LambdaFunction& f) {
    f.validate();
    if (const auto* e = std::get_if<EmpiricalParams>(&dist.params()))
        return empirical_crossing(*e, f);
    return continuous_crossing(dist, f);
}

RiskForecast lambda_var(const PredictiveDistribution& dist, const LambdaFunction& f) {
    double y = solve_crossing(dist, f);
    RiskForecast fc;
    fc.threshold_return = y;
    fc.var_value = -y;
    fc.coverage_prob = clamp_coverage(dist, dist.cdf_left(y), fc.coverage_clamped);
    fc.lambda_at_threshold = eval_lambda(f, y);
    return fc;
}

}  // namespace lvar
