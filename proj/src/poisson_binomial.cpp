#include "lvar/poisson_binomial.hpp"

#include <stdexcept>

namespace lvar {

PoissonBinomial::PoissonBinomial(const Eigen::VectorXd& probs) : probs_(probs) {
    const int n = static_cast<int>(probs.size());
    if (n < 1) throw std::invalid_argument("PoissonBinomial: need at least one trial");
    for (int i = 0; i < n; ++i)
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw std::invalid_argument("PoissonBinomial: probability outside [0,1]");
    pmf_ = Eigen::VectorXd::Zero(n + 1);
    pmf_[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        const double p = probs[i];
        for (int k = i + 1; k >= 1; --k) pmf_[k] = pmf_[k] * (1.0 - p) + pmf_[k - 1] * p;
        pmf_[0] *= 1.0 - p;
    }
}

double PoissonBinomial::cdf(int k) const {
    if (k < 0 || k > trials()) throw std::domain_error("PoissonBinomial::cdf: k outside [0,T]");
    return pmf_.head(k + 1).sum();
}

int PoissonBinomial::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("PoissonBinomial::quantile: u outside (0,1)");
    double acc = 0.0;
    for (int k = 0; k <= trials(); ++k) {
        acc += pmf_[k];
        if (acc >= u) return k;
    }
    return trials();
}

}  // namespace lvar
