#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace lvar {

using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

// Daily simple returns with their (strictly increasing) date labels.
// Dates are ordering metadata only; all protocol arithmetic is day-count based.
struct ReturnSeries {
    std::vector<std::string> dates;  // may be empty when synthetic
    Vector values;

    int size() const { return static_cast<int>(values.size()); }
    void validate() const;  // throws std::invalid_argument on violation
};

// Empirical step-function model: the W most recent returns, sorted ascending.
struct EmpiricalParams {
    Vector sorted_window;
};

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;  // > 0
};

// GARCH(1,1) with standardized Student-t innovations (unit variance, nu > 2).
// sigma2_next is the one-step-ahead conditional variance from the recursion
// sigma2[t+1] = omega + alpha * r[t]^2 + beta * sigma2[t].
struct GarchTParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double nu = 6.0;
    double sigma2_next = 0.0;

    void validate() const;
};

using ModelParams = std::variant<EmpiricalParams, GaussianParams, GarchTParams>;

// One-day-ahead predictive return distribution P_t. Immutable after
// construction; cdf is nondecreasing and right-continuous with limits 0 and 1.
class PredictiveDistribution {
public:
    explicit PredictiveDistribution(ModelParams params);

    double cdf(double x) const;       // P(X <= x)
    double cdf_left(double x) const;  // P(X < x)
    double quantile(double u) const;  // inf{x : cdf(x) >= u}, u in (0,1)
    double sample(Rng& rng) const;

    const ModelParams& params() const { return params_; }
    bool is_empirical() const { return std::holds_alternative<EmpiricalParams>(params_); }

private:
    ModelParams params_;
};

PredictiveDistribution fit_empirical(const Vector& window);
PredictiveDistribution fit_gaussian(const Vector& window);

struct GarchFitOptions {
    int starts = 3;
    int max_iter = 2000;
    double tol = 1e-8;  // on log-likelihood
    // When set, the optimizer runs a single start from these parameters
    // (plus one default start); used for day-over-day warm refits.
    const GarchTParams* warm_start = nullptr;
};

// Student-t GARCH(1,1) MLE over (omega, alpha, beta, nu); throws
// std::runtime_error on non-convergence or degenerate input.
PredictiveDistribution fit_garch_t(const Vector& window, const GarchFitOptions& opts = {});

// Negative log-likelihood of the standardized-t GARCH(1,1) model; the variance
// recursion is initialized at the sample variance of the window.
double garch_t_neg_loglik(const Vector& window, const GarchTParams& p);

}  // namespace lvar
