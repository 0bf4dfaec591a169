#pragma once

#include "lvar/distributions.hpp"
#include "lvar/lambda.hpp"

namespace lvar {

// One day-ahead risk forecast. var_value uses the positive-loss convention;
// threshold_return = -var_value is the return level whose breach counts as a
// violation; coverage_prob is the model-implied violation probability
// P_t(X < threshold_return), left limit.
struct RiskForecast {
    double var_value = 0.0;
    double threshold_return = 0.0;
    double coverage_prob = 0.0;
    bool coverage_clamped = false;    // degenerate left limit was floored
    double lambda_at_threshold = 0.0; // eval of the Lambda function at the threshold
};

RiskForecast var(const PredictiveDistribution& dist, double level);

RiskForecast lambda_var(const PredictiveDistribution& dist, const LambdaFunction& f);

// inf{x : cdf(x) > Lambda(x)}. Exact left-to-right scan over sample points and
// segment crossings for empirical distributions; per-segment scan plus
// bisection (1e-10 on x) for continuous ones.
double solve_crossing(const PredictiveDistribution& dist, const LambdaFunction& f);

}  // namespace lvar
