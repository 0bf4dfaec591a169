#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lvar/backtests.hpp"
#include "lvar/distributions.hpp"
#include "lvar/lambda.hpp"
#include "lvar/risk.hpp"

namespace lvar {

enum class ModelId { historical, gaussian, garch_t };

std::string to_string(ModelId id);
ModelId model_from_string(const std::string& s);

// One asset's rolling-window protocol: trailing estimation window, fixed-size
// evaluation spans stepped by their own length.
struct BacktestPlan {
    ReturnSeries asset;
    BenchmarkPanel benchmarks;
    std::string asset_id = "asset";
    ModelId model = ModelId::historical;
    int estimation_window = 250;   // 500 for the GARCH model
    int calibration_window = 250;  // benchmark window behind each Lambda fit
    int horizon = 250;             // evaluation days per window
    int n_windows = 6;
    LambdaConfig lambda_cfg;
    double var_level = 0.01;  // reference VaR confidence level
    std::vector<TestId> tests = {TestId::test1, TestId::test2, TestId::test3,
                                 TestId::kupiec_pof, TestId::kupiec_lambda};
    double alpha = 0.10;
    int m_sims = 10000;
    std::uint64_t seed = 42;
    bool recalibrate_daily = true;
    double fit_failure_budget = 0.01;  // fraction of days before a window is invalidated

    int first_eval_day() const;
    void validate() const;
};

struct DayRecord {
    ModelParams params;  // enough to reconstruct P_t
    RiskForecast var_forecast;
    RiskForecast lvar_forecast;
    double realized = 0.0;
    bool var_hit = false;
    bool lvar_hit = false;
    bool fit_carried = false;  // model fit failed, previous parameters reused
};

struct WindowResult {
    int window_id = 0;
    int first_day = 0;  // index into the asset series
    std::vector<DayRecord> days;
    HitSequence var_hits;
    HitSequence lvar_hits;
    std::vector<TestReport> var_tests;
    std::vector<TestReport> lvar_tests;
    int n_fit_failures = 0;
    bool invalidated = false;
};

struct RunArchive {
    std::string asset_id;
    ModelId model = ModelId::historical;
    LambdaConfig lambda_cfg;
    double var_level = 0.01;
    double alpha = 0.10;
    std::uint64_t seed = 42;
    std::vector<WindowResult> windows;
};

RunArchive run_backtest(const BacktestPlan& plan);

struct AcceptanceRow {
    std::string model_id;
    std::string measure;  // "var" or "lvar"
    std::string direction;
    double benchmark_var_level = 0.01;
    int window_id = 0;
    int n_runs = 0;
    double avg_violations = 0.0;
    std::map<std::string, double> acceptance_rate;  // by test id
};

struct AcceptanceTable {
    std::vector<AcceptanceRow> rows;
};

AcceptanceTable aggregate(const std::vector<RunArchive>& archives);

enum class GeneratorId { iid_gaussian, garch_t, regime_shift };

struct SyntheticParams {
    double mu = 0.0;
    double sigma = 0.01;          // iid_gaussian / regime_shift
    double regime_factor = 2.0;   // volatility multiplier after the midpoint
    double omega = 1e-6;          // garch_t
    double alpha = 0.08;
    double beta = 0.90;
    double nu = 6.0;
};

ReturnSeries gen_synthetic(GeneratorId gen, const SyntheticParams& params, int length,
                           std::uint64_t seed);

}  // namespace lvar
