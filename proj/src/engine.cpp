#include "lvar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace lvar {

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::historical: return "historical";
        case ModelId::gaussian: return "gaussian";
        case ModelId::garch_t: return "garch_t";
    }
    return "unknown";
}

ModelId model_from_string(const std::string& s) {
    if (s == "historical") return ModelId::historical;
    if (s == "gaussian") return ModelId::gaussian;
    if (s == "garch_t" || s == "garch") return ModelId::garch_t;
    throw std::invalid_argument("unknown model id: " + s);
}

int BacktestPlan::first_eval_day() const {
    return std::max(estimation_window, calibration_window);
}

void BacktestPlan::validate() const {
    lambda_cfg.validate();
    benchmarks.validate();
    asset.validate();
    if (estimation_window < 2) throw std::invalid_argument("BacktestPlan: estimation window too short");
    if (horizon < 1 || n_windows < 1) throw std::invalid_argument("BacktestPlan: empty schedule");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("BacktestPlan: alpha outside (0,1)");
    int need = first_eval_day() + n_windows * horizon;
    if (asset.size() < need)
        throw std::invalid_argument("BacktestPlan: insufficient asset history");
    if (benchmarks.length() < need)
        throw std::invalid_argument("BacktestPlan: insufficient benchmark history");
    bool has3 = std::find(tests.begin(), tests.end(), TestId::test3) != tests.end();
    if (has3 && m_sims < 1000) throw std::invalid_argument("BacktestPlan: test3 needs M >= 1000");
}

namespace {

PredictiveDistribution fit_model(const BacktestPlan& plan, int day,
                                 const GarchTParams* warm) {
    const Vector window =
        plan.asset.values.segment(day - plan.estimation_window, plan.estimation_window);
    switch (plan.model) {
        case ModelId::historical: return fit_empirical(window);
        case ModelId::gaussian: return fit_gaussian(window);
        case ModelId::garch_t: {
            GarchFitOptions opts;
            opts.warm_start = warm;
            if (warm) opts.max_iter = 400;  // daily refit from yesterday's optimum
            return fit_garch_t(window, opts);
        }
    }
    throw std::logic_error("fit_model: unreachable");
}

}  // namespace

RunArchive run_backtest(const BacktestPlan& plan) {
    plan.validate();
    RunArchive archive;
    archive.asset_id = plan.asset_id;
    archive.model = plan.model;
    archive.lambda_cfg = plan.lambda_cfg;
    archive.var_level = plan.var_level;
    archive.alpha = plan.alpha;
    archive.seed = plan.seed;

    const int start = plan.first_eval_day();
    GarchTParams warm{};
    bool have_warm = false;

    for (int w = 0; w < plan.n_windows; ++w) {
        WindowResult win;
        win.window_id = w;
        win.first_day = start + w * plan.horizon;
        win.days.reserve(plan.horizon);

        LambdaFunction lam = LambdaFunction::constant(plan.lambda_cfg.lambda_max);
        bool have_lambda = false;
        std::optional<PredictiveDistribution> dist;

        for (int d = 0; d < plan.horizon; ++d) {
            const int t = win.first_day + d;
            DayRecord day;
            day.realized = plan.asset.values[t];

            try {
                dist = fit_model(plan, t, have_warm ? &warm : nullptr);
            } catch (const std::exception&) {
                ++win.n_fit_failures;
                day.fit_carried = true;
                if (!dist) {
                    win.invalidated = true;
                    break;  // no parameters to carry on the very first day
                }
            }
            if (const auto* g = std::get_if<GarchTParams>(&dist->params())) {
                warm = *g;
                have_warm = true;
            }

            if (plan.recalibrate_daily || !have_lambda) {
                lam = calibrate_lambda(plan.benchmarks, plan.lambda_cfg,
                                       t - plan.calibration_window, t - 1);
                have_lambda = true;
            }

            day.params = dist->params();
            day.var_forecast = var(*dist, plan.var_level);
            day.lvar_forecast = lambda_var(*dist, lam);
            day.var_hit = day.realized < day.var_forecast.threshold_return;
            day.lvar_hit = day.realized < day.lvar_forecast.threshold_return;
            win.days.push_back(std::move(day));
        }

        if (win.n_fit_failures > plan.fit_failure_budget * plan.horizon) win.invalidated = true;
        if (win.invalidated || win.days.empty()) {
            archive.windows.push_back(std::move(win));
            continue;
        }

        Vector realized(win.days.size());
        std::vector<RiskForecast> var_fcs, lvar_fcs;
        std::vector<PredictiveDistribution> stored;
        var_fcs.reserve(win.days.size());
        lvar_fcs.reserve(win.days.size());
        stored.reserve(win.days.size());
        for (std::size_t i = 0; i < win.days.size(); ++i) {
            realized[static_cast<int>(i)] = win.days[i].realized;
            var_fcs.push_back(win.days[i].var_forecast);
            lvar_fcs.push_back(win.days[i].lvar_forecast);
            stored.emplace_back(win.days[i].params);
        }
        win.var_hits = hit_sequence(realized, var_fcs);
        win.lvar_hits = hit_sequence(realized, lvar_fcs);

        const std::uint64_t wseed = plan.seed + 1000003ull * static_cast<std::uint64_t>(w);
        auto run_tests = [&](const HitSequence& h, const std::vector<RiskForecast>& fcs,
                             bool is_lvar) {
            std::vector<TestReport> out;
            for (TestId id : plan.tests) {
                TestReport r;
                switch (id) {
                    case TestId::test1: r = test1_coverage(h, plan.alpha); break;
                    case TestId::test2: r = test2_asymptotic(h, plan.alpha); break;
                    case TestId::test3:
                        r = test3_simulation(h, stored, fcs, plan.m_sims, plan.alpha,
                                             wseed + (is_lvar ? 1 : 0));
                        break;
                    case TestId::kupiec_pof:
                        if (is_lvar) continue;
                        r = kupiec_pof(h.n_violations(), h.length(), plan.var_level, plan.alpha);
                        break;
                    case TestId::kupiec_lambda:
                        if (!is_lvar) continue;
                        r = kupiec_pof(h.n_violations(), h.length(), plan.lambda_cfg.lambda_max,
                                       plan.alpha);
                        r.test_id = TestId::kupiec_lambda;
                        break;
                }
                r.window_id = w;
                r.asset_id = plan.asset_id;
                r.model_id = to_string(plan.model);
                out.push_back(std::move(r));
            }
            return out;
        };
        win.var_tests = run_tests(win.var_hits, var_fcs, false);
        win.lvar_tests = run_tests(win.lvar_hits, lvar_fcs, true);
        archive.windows.push_back(std::move(win));
    }
    return archive;
}

AcceptanceTable aggregate(const std::vector<RunArchive>& archives) {
    if (archives.empty()) throw std::invalid_argument("aggregate: no archives");
    struct Acc {
        int n_runs = 0;
        long long violations = 0;
        std::map<std::string, std::pair<int, int>> accepted;  // test -> (accepts, total)
    };
    std::map<std::tuple<std::string, std::string, std::string, double, int>, Acc> acc;

    for (const auto& a : archives) {
        std::string dir =
            a.lambda_cfg.direction == LambdaDirection::increasing ? "increasing" : "decreasing";
        for (const auto& w : a.windows) {
            if (w.invalidated) continue;
            auto fold = [&](const std::string& measure, const HitSequence& h,
                            const std::vector<TestReport>& reports) {
                auto key = std::make_tuple(to_string(a.model), measure, dir,
                                           a.lambda_cfg.benchmark_var_level, w.window_id);
                Acc& slot = acc[key];
                ++slot.n_runs;
                slot.violations += h.n_violations();
                for (const auto& r : reports) {
                    auto& [ok, total] = slot.accepted[to_string(r.test_id)];
                    ++total;
                    if (r.verdict == Verdict::accept) ++ok;
                }
            };
            fold("var", w.var_hits, w.var_tests);
            fold("lvar", w.lvar_hits, w.lvar_tests);
        }
    }

    AcceptanceTable table;
    for (const auto& [key, slot] : acc) {
        AcceptanceRow row;
        std::tie(row.model_id, row.measure, row.direction, row.benchmark_var_level,
                 row.window_id) = key;
        row.n_runs = slot.n_runs;
        row.avg_violations = static_cast<double>(slot.violations) / slot.n_runs;
        for (const auto& [test, counts] : slot.accepted)
            row.acceptance_rate[test] = static_cast<double>(counts.first) / counts.second;
        table.rows.push_back(std::move(row));
    }
    return table;
}

ReturnSeries gen_synthetic(GeneratorId gen, const SyntheticParams& p, int length,
                           std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("gen_synthetic: length < 1");
    Rng rng(seed);
    Vector values(length);
    switch (gen) {
        case GeneratorId::iid_gaussian: {
            if (!(p.sigma > 0.0)) throw std::invalid_argument("gen_synthetic: sigma <= 0");
            std::normal_distribution<double> n(p.mu, p.sigma);
            for (int t = 0; t < length; ++t) values[t] = n(rng);
            break;
        }
        case GeneratorId::regime_shift: {
            if (!(p.sigma > 0.0 && p.regime_factor > 0.0))
                throw std::invalid_argument("gen_synthetic: bad regime parameters");
            std::normal_distribution<double> n(0.0, 1.0);
            const int half = length / 2;
            for (int t = 0; t < length; ++t) {
                double s = t < half ? p.sigma : p.sigma * p.regime_factor;
                values[t] = p.mu + s * n(rng);
            }
            break;
        }
        case GeneratorId::garch_t: {
            GarchTParams gp{p.omega, p.alpha, p.beta, p.nu, 1.0};
            gp.sigma2_next = p.omega / (1.0 - p.alpha - p.beta);
            gp.validate();
            std::student_t_distribution<double> tdist(p.nu);
            const double scale = std::sqrt((p.nu - 2.0) / p.nu);
            double sigma2 = gp.sigma2_next;
            for (int t = 0; t < length; ++t) {
                double r = std::sqrt(sigma2) * scale * tdist(rng);
                values[t] = r;
                sigma2 = p.omega + p.alpha * r * r + p.beta * sigma2;
            }
            break;
        }
    }
    // Simple returns cannot reach -1.
    for (int t = 0; t < length; ++t) values[t] = std::max(values[t], -0.999999);

    ReturnSeries s;
    s.values = std::move(values);
    s.dates.reserve(length);
    // Synthetic day counter rendered as a fixed-width ISO-like label.
    for (int t = 0; t < length; ++t) {
        int day = t;
        int y = 2000 + day / 360;
        int m = (day % 360) / 30 + 1;
        int d = (day % 30) + 1;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        s.dates.emplace_back(buf);
    }
    return s;
}

}  // namespace lvar
