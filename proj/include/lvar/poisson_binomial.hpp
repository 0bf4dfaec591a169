#pragma once

#include <Eigen/Dense>

namespace lvar {

// Exact distribution of a sum of independent Bernoulli trials with unequal
// success probabilities, built by iterative convolution.
class PoissonBinomial {
public:
    explicit PoissonBinomial(const Eigen::VectorXd& probs);

    int trials() const { return static_cast<int>(probs_.size()); }
    const Eigen::VectorXd& pmf() const { return pmf_; }

    double cdf(int k) const;       // P(sum <= k)
    int quantile(double u) const;  // min{k : cdf(k) >= u}

    double mean() const { return probs_.sum(); }
    double variance() const { return (probs_.array() * (1.0 - probs_.array())).sum(); }

private:
    Eigen::VectorXd probs_;
    Eigen::VectorXd pmf_;  // length trials()+1
};

}  // namespace lvar
