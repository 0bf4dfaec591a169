#pragma once

#include <vector>

#include "lvar/distributions.hpp"

namespace lvar {

enum class LambdaDirection { increasing, decreasing };

// Monotone piecewise-linear map from return levels into (0,1): flat at the
// first breakpoint's level below it, flat at the last one's level above it,
// linear interpolation in between.
struct LambdaFunction {
    struct Breakpoint {
        double x;       // return level
        double lambda;  // probability level
    };
    std::vector<Breakpoint> breakpoints;  // x strictly increasing
    LambdaDirection direction = LambdaDirection::increasing;
    bool order_repaired = false;  // set when calibration had to sort pi levels
    bool degenerate = false;      // set when the panel collapsed to a constant

    double max_lambda() const;
    double min_lambda() const;
    void validate() const;

    static LambdaFunction constant(double lambda);
};

double eval_lambda(const LambdaFunction& f, double x);

struct LambdaConfig {
    double lambda_min = 0.005;
    double lambda_max = 0.01;
    int n_points = 4;
    double benchmark_var_level = 0.01;  // 0.05 or 0.01
    LambdaDirection direction = LambdaDirection::increasing;
    // Interior levels come from an equipartition of (0, lambda_max] into
    // n_points parts (quarters by default); set to 3 for the thirds reading.
    int equipartition_parts = 4;

    void validate() const;
};

// Aligned panel of B benchmark return series over a calibration window.
struct BenchmarkPanel {
    std::vector<ReturnSeries> series;  // all same length

    int n_benchmarks() const { return static_cast<int>(series.size()); }
    int length() const { return series.empty() ? 0 : series.front().size(); }
    void validate() const;
};

// Dynamic-benchmark calibration from the panel rows [first, last] (inclusive
// day indices into each series). Return-axis points: the panel-wide minimum
// return, then the most severe / mean / least severe of the per-benchmark
// empirical VaR levels (negated onto the return axis).
LambdaFunction calibrate_lambda(const BenchmarkPanel& panel, const LambdaConfig& cfg,
                                int first, int last);

}  // namespace lvar
