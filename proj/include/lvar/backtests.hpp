#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lvar/distributions.hpp"
#include "lvar/lambda.hpp"
#include "lvar/risk.hpp"

namespace lvar {

// Violation indicators paired with the model coverage probabilities that
// generated them.
struct HitSequence {
    std::vector<int> hits;         // 0/1
    std::vector<double> coverage;  // in (0,1)
    std::vector<int> flags;        // per-day degeneracy markers (coverage clamped)

    int length() const { return static_cast<int>(hits.size()); }
    int n_violations() const;
    void validate() const;
};

enum class TestId { test1, test2, test3, kupiec_pof, kupiec_lambda };

std::string to_string(TestId id);

enum class Verdict { accept, reject };

struct TestReport {
    TestId test_id = TestId::test1;
    double statistic = 0.0;
    std::optional<double> p_value;
    double alpha = 0.10;
    Verdict verdict = Verdict::accept;
    int n_violations = 0;
    // Metadata
    int horizon = 0;
    int window_id = -1;
    std::string asset_id;
    std::string model_id;
    // Bilateral critical region of the exact coverage test, for diagnostics.
    std::optional<int> critical_lo;
    std::optional<int> critical_hi;
};

HitSequence hit_sequence(const Vector& realized, const std::vector<RiskForecast>& forecasts);

// Exact Poisson-Binomial coverage test, unilateral upper tail:
// reject iff P_{Z1}(z1) > 1 - alpha.
TestReport test1_coverage(const HitSequence& h, double alpha);

// Asymptotic normal coverage test (bilateral).
TestReport test2_asymptotic(const HitSequence& h, double alpha);

// Simulation test of the P&L distribution assumption: redraws each day's
// return from the stored predictive model, keeping the thresholds fixed.
// p = (1 + #{Z3_sim <= z3}) / (M + 1); reject iff p < alpha.
TestReport test3_simulation(const HitSequence& h,
                            const std::vector<PredictiveDistribution>& stored_models,
                            const std::vector<RiskForecast>& forecasts, int m_sims,
                            double alpha, std::uint64_t seed);

// Kupiec proportion-of-failures likelihood ratio with the unilateral gate:
// accept outright whenever n/T <= lambda0.
TestReport kupiec_pof(int n_violations, int horizon, double lambda0, double alpha);

TestReport kupiec_lambda(int n_violations, int horizon, const LambdaFunction& f, double alpha);

}  // namespace lvar
