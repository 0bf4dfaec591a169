#include "lvar/io.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "lvar/poisson_binomial.hpp"
#include "lvar/special.hpp"

namespace lvar {

namespace {

using nlohmann::json;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool valid_iso_date(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
    return true;
}

double parse_number(const std::string& cell) {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (trim(cell.substr(pos)) != "") throw DataError("non-numeric cell: " + cell);
    return v;
}

std::string format_sig4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

CsvParseResult parse_returns_csv(const std::string& path, CsvMode mode) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    auto header = split_csv_line(line);
    if (header.size() < 2) throw DataError("header must name a date column and at least one asset");

    const std::size_t ncols = header.size();
    std::vector<std::string> dates;
    std::vector<std::vector<double>> cols(ncols - 1);
    int dropped = 0;

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != ncols) {
            ++dropped;
            continue;
        }
        bool missing = false;
        for (const auto& c : cells)
            if (trim(c).empty()) missing = true;
        if (missing) {
            ++dropped;
            continue;
        }
        std::string date = trim(cells[0]);
        if (!valid_iso_date(date)) throw DataError("malformed date: " + date);
        std::vector<double> row(ncols - 1);
        try {
            for (std::size_t j = 1; j < ncols; ++j) row[j - 1] = parse_number(trim(cells[j]));
        } catch (const std::invalid_argument&) {
            throw DataError("non-numeric cell in row dated " + date);
        }
        dates.push_back(std::move(date));
        for (std::size_t j = 0; j + 1 < ncols; ++j) cols[j].push_back(row[j]);
    }
    if (dates.size() < 2) throw DataError("need at least 2 data rows: " + path);

    CsvParseResult out;
    out.dropped_rows = dropped;
    for (std::size_t j = 1; j < ncols; ++j) out.names.push_back(trim(header[j]));

    for (std::size_t j = 0; j < cols.size(); ++j) {
        ReturnSeries s;
        if (mode == CsvMode::prices) {
            s.values.resize(static_cast<int>(dates.size()) - 1);
            for (std::size_t t = 1; t < dates.size(); ++t) {
                if (cols[j][t - 1] == 0.0) throw DataError("zero price in column " + out.names[j]);
                s.values[static_cast<int>(t) - 1] = cols[j][t] / cols[j][t - 1] - 1.0;
                s.dates.assign(dates.begin() + 1, dates.end());
            }
            if (s.dates.empty()) s.dates.assign(dates.begin() + 1, dates.end());
        } else {
            s.values.resize(static_cast<int>(dates.size()));
            for (std::size_t t = 0; t < dates.size(); ++t) s.values[static_cast<int>(t)] = cols[j][t];
            s.dates = dates;
        }
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string(e.what()) + " (column " + out.names[j] + ")");
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("config line missing '=': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* v = get("input.asset")) asset_csv = *v;
    if (auto* v = get("input.benchmarks")) benchmark_csv = *v;
    if (auto* v = get("input.mode")) csv_mode = (*v == "prices") ? CsvMode::prices : CsvMode::returns;
    if (auto* v = get("model.id")) model = model_from_string(*v);
    if (auto* v = get("model.estimation_window")) estimation_window = std::stoi(*v);
    if (auto* v = get("lambda.min")) lambda_cfg.lambda_min = std::stod(*v);
    if (auto* v = get("lambda.max")) lambda_cfg.lambda_max = std::stod(*v);
    if (auto* v = get("lambda.direction"))
        lambda_cfg.direction =
            (*v == "decreasing") ? LambdaDirection::decreasing : LambdaDirection::increasing;
    if (auto* v = get("lambda.benchmark_var_level")) lambda_cfg.benchmark_var_level = std::stod(*v);
    if (auto* v = get("lambda.calibration_window")) calibration_window = std::stoi(*v);
    if (auto* v = get("backtest.horizon")) horizon = std::stoi(*v);
    if (auto* v = get("backtest.windows")) n_windows = std::stoi(*v);
    if (auto* v = get("backtest.var_level")) var_level = std::stod(*v);
    if (auto* v = get("backtest.alpha")) alpha = std::stod(*v);
    if (auto* v = get("backtest.m_sims")) m_sims = std::stoi(*v);
    if (auto* v = get("backtest.seed")) seed = std::stoull(*v);
    if (auto* v = get("output.path")) output_path = *v;
    if (auto* v = get("output.format")) output_format = *v;
}

void RunConfig::validate() const {
    lambda_cfg.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
    if (m_sims < 1000) throw std::invalid_argument("m_sims must be >= 1000");
    if (output_format != "json" && output_format != "csv" && output_format != "table")
        throw std::invalid_argument("format must be json, csv or table");
}

namespace {

json report_to_json_obj(const TestReport& r) {
    json j;
    j["test_id"] = to_string(r.test_id);
    j["statistic"] = r.statistic;
    if (r.p_value)
        j["p_value"] = *r.p_value;
    else
        j["p_value"] = nullptr;
    j["alpha"] = r.alpha;
    j["verdict"] = r.verdict == Verdict::accept ? "accept" : "reject";
    j["n_violations"] = r.n_violations;
    j["horizon"] = r.horizon;
    j["window_id"] = r.window_id;
    j["asset_id"] = r.asset_id;
    j["model_id"] = r.model_id;
    if (r.critical_lo) j["critical_lo"] = *r.critical_lo;
    if (r.critical_hi) j["critical_hi"] = *r.critical_hi;
    return j;
}

TestReport report_from_json_obj(const json& j) {
    TestReport r;
    std::string id = j.at("test_id");
    if (id == "test1") r.test_id = TestId::test1;
    else if (id == "test2") r.test_id = TestId::test2;
    else if (id == "test3") r.test_id = TestId::test3;
    else if (id == "kupiec_pof") r.test_id = TestId::kupiec_pof;
    else if (id == "kupiec_lambda") r.test_id = TestId::kupiec_lambda;
    else throw DataError("unknown test_id in report: " + id);
    r.statistic = j.at("statistic");
    if (!j.at("p_value").is_null()) r.p_value = j.at("p_value").get<double>();
    r.alpha = j.at("alpha");
    r.verdict = j.at("verdict") == "accept" ? Verdict::accept : Verdict::reject;
    r.n_violations = j.at("n_violations");
    r.horizon = j.at("horizon");
    r.window_id = j.at("window_id");
    r.asset_id = j.at("asset_id");
    r.model_id = j.at("model_id");
    if (j.contains("critical_lo")) r.critical_lo = j.at("critical_lo").get<int>();
    if (j.contains("critical_hi")) r.critical_hi = j.at("critical_hi").get<int>();
    return r;
}

}  // namespace

std::string report_to_json(const AcceptanceTable& table, const std::vector<RunArchive>& archives,
                           const RunConfig& cfg) {
    if (archives.empty()) throw std::invalid_argument("report_to_json: empty archive list");
    json root;
    root["schema_version"] = 1;
    root["config"] = {
        {"model", to_string(cfg.model)},
        {"lambda_min", cfg.lambda_cfg.lambda_min},
        {"lambda_max", cfg.lambda_cfg.lambda_max},
        {"direction",
         cfg.lambda_cfg.direction == LambdaDirection::increasing ? "increasing" : "decreasing"},
        {"benchmark_var_level", cfg.lambda_cfg.benchmark_var_level},
        {"var_level", cfg.var_level},
        {"alpha", cfg.alpha},
        {"m_sims", cfg.m_sims},
        {"seed", cfg.seed},
    };
    json reports = json::array();
    for (const auto& a : archives) {
        for (const auto& w : a.windows) {
            for (const auto& r : w.var_tests) {
                json j = report_to_json_obj(r);
                j["measure"] = "var";
                reports.push_back(std::move(j));
            }
            for (const auto& r : w.lvar_tests) {
                json j = report_to_json_obj(r);
                j["measure"] = "lvar";
                reports.push_back(std::move(j));
            }
        }
    }
    root["reports"] = std::move(reports);
    json rows = json::array();
    for (const auto& row : table.rows) {
        json j;
        j["model"] = row.model_id;
        j["measure"] = row.measure;
        j["direction"] = row.direction;
        j["benchmark_var_level"] = row.benchmark_var_level;
        j["window_id"] = row.window_id;
        j["n_runs"] = row.n_runs;
        j["avg_violations"] = row.avg_violations;
        j["acceptance_rate"] = row.acceptance_rate;
        rows.push_back(std::move(j));
    }
    root["table"] = std::move(rows);
    return root.dump(2);
}

std::vector<TestReport> parse_report_json(const std::string& json_text) {
    json root = json::parse(json_text);
    if (root.at("schema_version") != 1) throw DataError("unsupported report schema version");
    std::vector<TestReport> out;
    for (const auto& j : root.at("reports")) out.push_back(report_from_json_obj(j));
    return out;
}

std::string report_to_text(const AcceptanceTable& table) {
    // Rows: (model, measure, direction, level); columns: windows.
    int max_window = 0;
    for (const auto& r : table.rows) max_window = std::max(max_window, r.window_id);

    std::vector<std::string> tests;
    for (const auto& r : table.rows)
        for (const auto& [t, _] : r.acceptance_rate)
            if (std::find(tests.begin(), tests.end(), t) == tests.end()) tests.push_back(t);
    std::sort(tests.begin(), tests.end());

    std::map<std::string, std::map<int, const AcceptanceRow*>> groups;
    for (const auto& r : table.rows) {
        std::string label = r.model_id + " " +
                            (r.measure == "var" ? "VaR " + format_sig4(100.0 * r.benchmark_var_level) + "%"
                                                : "LVaR (" + r.direction + ", bench " +
                                                      format_sig4(100.0 * r.benchmark_var_level) + "%)");
        groups[label][r.window_id] = &r;
    }

    std::ostringstream os;
    const int w0 = 44, wc = 10;
    auto cell = [&](const std::string& s, int w) {
        os << s;
        for (int i = static_cast<int>(s.size()); i < w; ++i) os << ' ';
    };
    cell("series", w0);
    for (int w = 0; w <= max_window; ++w) cell("win" + std::to_string(w), wc);
    os << "\n";

    for (const auto& [label, by_window] : groups) {
        cell(label + " [violations]", w0);
        for (int w = 0; w <= max_window; ++w) {
            auto it = by_window.find(w);
            cell(it == by_window.end() ? "-" : format_sig4(it->second->avg_violations), wc);
        }
        os << "\n";
        for (const auto& t : tests) {
            bool any = false;
            for (const auto& [w, row] : by_window) any |= row->acceptance_rate.count(t) > 0;
            if (!any) continue;
            cell(label + " [" + t + " accept]", w0);
            for (int w = 0; w <= max_window; ++w) {
                auto it = by_window.find(w);
                if (it == by_window.end() || !it->second->acceptance_rate.count(t)) {
                    cell("-", wc);
                } else {
                    cell(format_sig4(it->second->acceptance_rate.at(t)), wc);
                }
            }
            os << "\n";
        }
    }
    return os.str();
}

std::string report_to_csv(const AcceptanceTable& table) {
    std::ostringstream os;
    os << "model,measure,direction,benchmark_var_level,window_id,n_runs,avg_violations,test,"
          "acceptance_rate\n";
    for (const auto& r : table.rows)
        for (const auto& [t, rate] : r.acceptance_rate)
            os << r.model_id << ',' << r.measure << ',' << r.direction << ','
               << r.benchmark_var_level << ',' << r.window_id << ',' << r.n_runs << ','
               << r.avg_violations << ',' << t << ',' << rate << "\n";
    return os.str();
}

void emit_report(const AcceptanceTable& table, const std::vector<RunArchive>& archives,
                 const RunConfig& cfg) {
    if (archives.empty()) throw std::invalid_argument("emit_report: empty archive list");
    auto write = [](const std::string& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write: " + path);
        out << content;
    };
    write(cfg.output_path + ".json", report_to_json(table, archives, cfg));
    write(cfg.output_path + ".txt", report_to_text(table));
    if (cfg.output_format == "csv") write(cfg.output_path + ".csv", report_to_csv(table));
}

namespace {

void write_series_csv(const std::string& path, const std::vector<ReturnSeries>& series,
                      const std::vector<std::string>& names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write: " + path);
    out << "date";
    for (const auto& n : names) out << ',' << n;
    out << "\n";
    out.precision(17);
    for (int t = 0; t < series.front().size(); ++t) {
        out << series.front().dates[t];
        for (const auto& s : series) out << ',' << s.values[t];
        out << "\n";
    }
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    // Poisson-Binomial vs brute-force enumeration.
    {
        Rng rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        bool ok = true;
        for (int rep = 0; rep < 20 && ok; ++rep) {
            int n = 1 + static_cast<int>(u(rng) * 11);
            Eigen::VectorXd p(n);
            for (int i = 0; i < n; ++i) p[i] = u(rng);
            PoissonBinomial pb(p);
            Eigen::VectorXd brute = Eigen::VectorXd::Zero(n + 1);
            for (int mask = 0; mask < (1 << n); ++mask) {
                double prob = 1.0;
                int k = 0;
                for (int i = 0; i < n; ++i) {
                    if (mask & (1 << i)) {
                        prob *= p[i];
                        ++k;
                    } else {
                        prob *= 1.0 - p[i];
                    }
                }
                brute[k] += prob;
            }
            ok = (pb.pmf() - brute).cwiseAbs().maxCoeff() < 1e-12;
        }
        check(ok, "poisson-binomial matches enumeration");
    }

    // Constant-Lambda reduction and crossing solver vs grid oracle.
    {
        Rng rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        bool reduction_ok = true, crossing_ok = true;
        for (int rep = 0; rep < 10; ++rep) {
            double mu = 0.02 * (u(rng) - 0.5), sigma = 0.005 + 0.02 * u(rng);
            PredictiveDistribution dist(GaussianParams{mu, sigma});
            double level = 0.002 + 0.05 * u(rng);
            auto a = var(dist, level);
            auto b = lambda_var(dist, LambdaFunction::constant(level));
            reduction_ok = reduction_ok && std::fabs(a.var_value - b.var_value) < 1e-9 &&
                           std::fabs(a.coverage_prob - b.coverage_prob) < 1e-9;

            LambdaFunction f;
            f.breakpoints = {{mu - 3.0 * sigma, 0.001}, {mu - 2.0 * sigma, 0.01}};
            double got = solve_crossing(dist, f);
            double lo = mu - 8.0 * sigma, step = sigma * 1e-5, oracle = mu;
            for (double x = lo; x < mu; x += step) {
                if (dist.cdf(x) > eval_lambda(f, x)) {
                    double blo = x - step, bhi = x;
                    for (int i = 0; i < 80; ++i) {
                        double mid = 0.5 * (blo + bhi);
                        (dist.cdf(mid) > eval_lambda(f, mid) ? bhi : blo) = mid;
                    }
                    oracle = 0.5 * (blo + bhi);
                    break;
                }
            }
            crossing_ok = crossing_ok && std::fabs(got - oracle) < 1e-6;
        }
        check(reduction_ok, "constant-Lambda reduction equals plain VaR");
        check(crossing_ok, "crossing solver matches grid oracle");
    }

    // Frozen distribution values.
    check(std::fabs(std_normal_quantile(0.975) - 1.959964) < 1e-5, "normal quantile 97.5%");
    check(std::fabs(std_normal_cdf(0.0) - 0.5) < 1e-15, "normal cdf at 0");
    check(std::fabs(student_t_cdf(0.0, 6.0) - 0.5) < 1e-15, "t cdf at 0");
    {
        auto r = kupiec_pof(0, 250, 0.01, 0.10);
        check(std::fabs(r.statistic - 5.025) < 1e-3 && r.verdict == Verdict::accept,
              "kupiec LR(250, 0, 1%) with unilateral acceptance");
    }
    return failures == 0 ? exit_ok : exit_numeric;
}

RunConfig load_config(const std::string& config_path) {
    RunConfig cfg;
    if (!config_path.empty()) cfg.apply(parse_config_file(config_path));
    return cfg;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Lambda Value at Risk toolkit"};
    app.require_subcommand(1);

    std::string config_path, model_str, direction_str, output, format;
    double alpha = -1.0, lambda_min = -1.0, lambda_max = -1.0, bench_level = -1.0;
    int m_sims = -1;
    std::int64_t seed = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--model", model_str, "historical | gaussian | garch_t");
        sub->add_option("--alpha", alpha, "test significance level");
        sub->add_option("--m-sims", m_sims, "simulation count for test3");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--lambda-min", lambda_min, "Lambda lower bound");
        sub->add_option("--lambda-max", lambda_max, "Lambda upper bound");
        sub->add_option("--direction", direction_str, "increasing | decreasing");
        sub->add_option("--benchmark-var-level", bench_level, "benchmark VaR level (0.05 or 0.01)");
        sub->add_option("--output", output, "output path prefix");
        sub->add_option("--format", format, "json | csv | table");
    };

    std::string asset_csv, bench_csv, gen_str = "iid_gaussian";
    int day = -1, length = 1000, n_assets = 1, n_bench = 3;
    bool prices = false;

    auto* calibrate = app.add_subcommand("calibrate", "print Lambda breakpoints for a day");
    add_common(calibrate);
    calibrate->add_option("--benchmarks", bench_csv, "benchmark CSV")->required();
    calibrate->add_option("--day", day, "day index (default: last usable day)");

    auto* measure = app.add_subcommand("measure", "daily VaR/LambdaVaR series");
    add_common(measure);
    measure->add_option("--asset", asset_csv, "asset CSV")->required();
    measure->add_option("--benchmarks", bench_csv, "benchmark CSV")->required();
    measure->add_flag("--prices", prices, "input columns are prices, not returns");

    auto* backtest = app.add_subcommand("backtest", "full backtesting pipeline");
    add_common(backtest);
    backtest->add_option("--asset", asset_csv, "asset CSV (overrides config)");
    backtest->add_option("--benchmarks", bench_csv, "benchmark CSV (overrides config)");
    backtest->add_flag("--prices", prices, "input columns are prices, not returns");

    auto* synth = app.add_subcommand("synth", "generate synthetic return panels");
    add_common(synth);
    synth->add_option("--generator", gen_str, "iid_gaussian | garch_t | regime_shift");
    synth->add_option("--length", length, "days to generate");
    synth->add_option("--assets", n_assets, "asset columns");
    synth->add_option("--bench", n_bench, "benchmark columns");

    auto* selftest = app.add_subcommand("selftest", "run the oracle-equivalence property suite");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (!asset_csv.empty()) cfg.asset_csv = asset_csv;
        if (!bench_csv.empty()) cfg.benchmark_csv = bench_csv;
        if (prices) cfg.csv_mode = CsvMode::prices;
        if (!model_str.empty()) cfg.model = model_from_string(model_str);
        if (alpha >= 0.0) cfg.alpha = alpha;
        if (m_sims >= 0) cfg.m_sims = m_sims;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (lambda_min >= 0.0) cfg.lambda_cfg.lambda_min = lambda_min;
        if (lambda_max >= 0.0) cfg.lambda_cfg.lambda_max = lambda_max;
        if (!direction_str.empty())
            cfg.lambda_cfg.direction = direction_str == "decreasing" ? LambdaDirection::decreasing
                                                                     : LambdaDirection::increasing;
        if (bench_level >= 0.0) cfg.lambda_cfg.benchmark_var_level = bench_level;
        if (!output.empty()) cfg.output_path = output;
        if (!format.empty()) cfg.output_format = format;
        if (cfg.model == ModelId::garch_t && cfg.estimation_window == 250)
            cfg.estimation_window = 500;
        cfg.validate();

        if (app.got_subcommand("selftest")) return run_selftest();

        if (app.got_subcommand("synth")) {
            GeneratorId gen;
            if (gen_str == "iid_gaussian") gen = GeneratorId::iid_gaussian;
            else if (gen_str == "garch_t") gen = GeneratorId::garch_t;
            else if (gen_str == "regime_shift") gen = GeneratorId::regime_shift;
            else throw std::invalid_argument("unknown generator: " + gen_str);
            SyntheticParams sp;
            std::vector<ReturnSeries> assets, bench;
            std::vector<std::string> anames, bnames;
            for (int i = 0; i < n_assets; ++i) {
                assets.push_back(gen_synthetic(gen, sp, length, cfg.seed + i));
                anames.push_back("asset" + std::to_string(i));
            }
            for (int i = 0; i < n_bench; ++i) {
                bench.push_back(gen_synthetic(gen, sp, length, cfg.seed + 1000 + i));
                bnames.push_back("bench" + std::to_string(i));
            }
            write_series_csv(cfg.output_path + "_assets.csv", assets, anames);
            write_series_csv(cfg.output_path + "_bench.csv", bench, bnames);
            std::cout << "wrote " << cfg.output_path << "_assets.csv and " << cfg.output_path
                      << "_bench.csv\n";
            return exit_ok;
        }

        auto bench_parsed = parse_returns_csv(cfg.benchmark_csv, cfg.csv_mode);
        if (bench_parsed.dropped_rows > 0)
            std::cerr << "warning: dropped " << bench_parsed.dropped_rows
                      << " incomplete benchmark rows\n";
        BenchmarkPanel panel{bench_parsed.series};

        if (app.got_subcommand("calibrate")) {
            int last = day >= 0 ? day : panel.length() - 1;
            int first = last - 249;
            if (first < 0) throw std::invalid_argument("calibrate: fewer than 250 benchmark days");
            auto f = calibrate_lambda(panel, cfg.lambda_cfg, first, last);
            std::cout << "direction: "
                      << (f.direction == LambdaDirection::increasing ? "increasing" : "decreasing")
                      << (f.degenerate ? " (degenerate panel, constant fallback)" : "") << "\n";
            for (const auto& b : f.breakpoints)
                std::cout << "pi = " << format_sig4(b.x) << "  lambda = " << format_sig4(b.lambda)
                          << "\n";
            return exit_ok;
        }

        auto asset_parsed = parse_returns_csv(cfg.asset_csv, cfg.csv_mode);
        if (asset_parsed.dropped_rows > 0)
            std::cerr << "warning: dropped " << asset_parsed.dropped_rows
                      << " incomplete asset rows\n";

        if (app.got_subcommand("measure")) {
            const auto& s = asset_parsed.series.front();
            int start = std::max(cfg.estimation_window, cfg.calibration_window);
            std::cout << "date,var,lambda_var,coverage\n";
            for (int t = start; t < s.size(); ++t) {
                Vector window = s.values.segment(t - cfg.estimation_window, cfg.estimation_window);
                PredictiveDistribution dist =
                    cfg.model == ModelId::historical ? fit_empirical(window)
                    : cfg.model == ModelId::gaussian ? fit_gaussian(window)
                                                     : fit_garch_t(window);
                auto lam = calibrate_lambda(panel, cfg.lambda_cfg, t - cfg.calibration_window, t - 1);
                auto v = var(dist, cfg.var_level);
                auto lv = lambda_var(dist, lam);
                std::cout << s.dates[t] << ',' << format_sig4(v.var_value) << ','
                          << format_sig4(lv.var_value) << ',' << format_sig4(lv.coverage_prob)
                          << "\n";
            }
            return exit_ok;
        }

        // backtest
        std::vector<RunArchive> archives;
        for (std::size_t i = 0; i < asset_parsed.series.size(); ++i) {
            BacktestPlan plan;
            plan.asset = asset_parsed.series[i];
            plan.asset_id = asset_parsed.names[i];
            plan.benchmarks = panel;
            plan.model = cfg.model;
            plan.estimation_window = cfg.estimation_window;
            plan.calibration_window = cfg.calibration_window;
            plan.horizon = cfg.horizon;
            plan.lambda_cfg = cfg.lambda_cfg;
            plan.var_level = cfg.var_level;
            plan.alpha = cfg.alpha;
            plan.m_sims = cfg.m_sims;
            plan.seed = cfg.seed + i;
            int usable = plan.asset.size() - plan.first_eval_day();
            plan.n_windows = std::min(cfg.n_windows, usable / plan.horizon);
            if (plan.n_windows < 1)
                throw std::invalid_argument("backtest: insufficient history for one window");
            archives.push_back(run_backtest(plan));
        }
        auto table = aggregate(archives);
        emit_report(table, archives, cfg);
        std::cout << report_to_text(table);
        std::cout << "report written to " << cfg.output_path << ".json\n";
        return exit_ok;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numeric;
    }
}

}  // namespace lvar
