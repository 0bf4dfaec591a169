#pragma once

namespace lvar {

// Standard normal CDF, absolute error below 1e-15.
double std_normal_cdf(double z);

// Standard normal density.
double std_normal_pdf(double z);

// Inverse of std_normal_cdf for u in (0,1); inverts the CDF to better
// than 1e-8. Throws std::domain_error outside (0,1).
double std_normal_quantile(double u);

// Student-t CDF with nu degrees of freedom (nu > 0), via the regularized
// incomplete beta function.
double student_t_cdf(double z, double nu);

// Inverse of student_t_cdf in z for fixed nu.
double student_t_quantile(double u, double nu);

// Chi-squared CDF with one degree of freedom: 2*Phi(sqrt(x)) - 1.
double chi2_1_cdf(double x);

// Quantile of the chi-squared(1) distribution.
double chi2_1_quantile(double u);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

double log_gamma(double x);

}  // namespace lvar
