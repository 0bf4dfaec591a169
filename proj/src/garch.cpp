#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lvar/distributions.hpp"
#include "lvar/special.hpp"

namespace lvar {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

constexpr double kNuLo = 2.5;
constexpr double kNuHi = 100.0;
constexpr double kStatCap = 1.0 - 1e-6;  // alpha + beta < this

// Unconstrained coordinates: (log omega, logit-scaled alpha, beta share, nu).
struct Theta {
    std::array<double, 4> v;
};

GarchTParams decode(const Theta& t) {
    GarchTParams p;
    p.omega = std::exp(t.v[0]);
    double a_raw = sigmoid(t.v[1]);
    double b_raw = sigmoid(t.v[2]);
    p.alpha = a_raw * kStatCap;
    p.beta = b_raw * (kStatCap - p.alpha);
    p.nu = kNuLo + (kNuHi - kNuLo) * sigmoid(t.v[3]);
    return p;
}

Theta encode(const GarchTParams& p) {
    Theta t;
    t.v[0] = std::log(std::max(p.omega, 1e-300));
    double a = std::clamp(p.alpha / kStatCap, 1e-8, 1.0 - 1e-8);
    t.v[1] = logit(a);
    double bshare = std::clamp(p.beta / std::max(kStatCap - p.alpha, 1e-12), 1e-8, 1.0 - 1e-8);
    t.v[2] = logit(bshare);
    double nshare = std::clamp((p.nu - kNuLo) / (kNuHi - kNuLo), 1e-8, 1.0 - 1e-8);
    t.v[3] = logit(nshare);
    return t;
}

double sample_variance(const Vector& w) {
    double mu = w.mean();
    return (w.array() - mu).square().sum() / (w.size() - 1);
}

// Nelder-Mead minimization over R^4.
double nelder_mead(const std::function<double(const Theta&)>& f, Theta& x0, double step,
                   int max_iter, double tol) {
    constexpr int n = 4;
    std::vector<Theta> s(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (int i = 1; i <= n; ++i) s[i].v[i - 1] += step;
    for (int i = 0; i <= n; ++i) fv[i] = f(s[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Theta> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            s2[i] = s[idx[i]];
            f2[i] = fv[idx[i]];
        }
        s.swap(s2);
        fv.swap(f2);
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::fabs(fv[n] - fv[0]) < tol * (1.0 + std::fabs(fv[0]))) break;
        Theta centroid{};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < 4; ++k) centroid.v[k] += s[i].v[k] / n;
        auto combine = [&](double coef) {
            Theta r;
            for (int k = 0; k < 4; ++k) r.v[k] = centroid.v[k] + coef * (centroid.v[k] - s[n].v[k]);
            return r;
        };
        Theta xr = combine(1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            Theta xe = combine(2.0);
            double fe = f(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
        } else {
            Theta xc = combine(fr < fv[n] ? 0.5 : -0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                s[n] = xc;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int k = 0; k < 4; ++k) s[i].v[k] = s[0].v[k] + 0.5 * (s[i].v[k] - s[0].v[k]);
                    fv[i] = f(s[i]);
                }
            }
        }
    }
    order();
    x0 = s[0];
    return fv[0];
}

}  // namespace

double garch_t_neg_loglik(const Vector& r, const GarchTParams& p) {
    const int n = static_cast<int>(r.size());
    const double nu = p.nu;
    const double lc = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
                      0.5 * std::log(M_PI * (nu - 2.0));
    double sigma2 = sample_variance(r);
    double nll = 0.0;
    for (int t = 0; t < n; ++t) {
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) return std::numeric_limits<double>::infinity();
        double x2 = r[t] * r[t];
        nll -= lc - 0.5 * std::log(sigma2) -
               0.5 * (nu + 1.0) * std::log1p(x2 / ((nu - 2.0) * sigma2));
        sigma2 = p.omega + p.alpha * x2 + p.beta * sigma2;
    }
    return nll;
}

PredictiveDistribution fit_garch_t(const Vector& window, const GarchFitOptions& opts) {
    const int n = static_cast<int>(window.size());
    if (n < 100) throw std::invalid_argument("fit_garch_t: window shorter than 100");
    const double var = sample_variance(window);
    // Relative threshold: a constant window leaves rounding noise, not zero.
    const double scale = window.array().square().mean();
    if (!(var > 1e-12 * std::max(scale, 1e-30)))
        throw std::invalid_argument("fit_garch_t: zero-variance window");

    auto objective = [&](const Theta& t) { return garch_t_neg_loglik(window, decode(t)); };

    std::vector<std::pair<GarchTParams, double>> starts;  // params + simplex step
    if (opts.warm_start) {
        starts.push_back({*opts.warm_start, 0.1});
    } else {
        GarchTParams s1{var * 0.05, 0.05, 0.90, 8.0, var};
        GarchTParams s2{var * 0.10, 0.10, 0.80, 5.0, var};
        GarchTParams s3{var * 0.28, 0.02, 0.70, 20.0, var};
        starts = {{s1, 0.25}, {s2, 0.25}, {s3, 0.25}};
        starts.resize(std::min<std::size_t>(starts.size(), std::max(opts.starts, 1)));
    }

    double best_nll = std::numeric_limits<double>::infinity();
    Theta best{};
    for (auto& [p0, step] : starts) {
        Theta t = encode(p0);
        double nll = nelder_mead(objective, t, step, opts.max_iter, opts.tol);
        if (nll < best_nll) {
            best_nll = nll;
            best = t;
        }
    }
    if (!std::isfinite(best_nll))
        throw std::runtime_error("fit_garch_t: optimizer failed to find a finite likelihood");

    GarchTParams p = decode(best);
    double sigma2 = var;
    for (int t = 0; t < n; ++t) sigma2 = p.omega + p.alpha * window[t] * window[t] + p.beta * sigma2;
    p.sigma2_next = sigma2;
    p.validate();
    return PredictiveDistribution(p);
}

}  // namespace lvar
