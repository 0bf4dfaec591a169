#pragma once

#include <map>
#include <string>
#include <vector>

#include "lvar/engine.hpp"

namespace lvar {

// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_numeric = 3,
};

struct CsvParseResult {
    std::vector<ReturnSeries> series;
    std::vector<std::string> names;  // column headers
    int dropped_rows = 0;            // rows with missing/blank cells
};

enum class CsvMode { returns, prices };

// First column ISO-8601 dates, one asset per subsequent column. Prices mode
// converts to simple returns p[t]/p[t-1] - 1. Throws std::runtime_error on
// malformed input.
CsvParseResult parse_returns_csv(const std::string& path, CsvMode mode);

// Flat key-value config file: one `section.key = value` per line, `#` comments.
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct RunConfig {
    std::string asset_csv;
    std::string benchmark_csv;
    CsvMode csv_mode = CsvMode::returns;
    ModelId model = ModelId::historical;
    LambdaConfig lambda_cfg;
    int estimation_window = 250;
    int calibration_window = 250;
    int horizon = 250;
    int n_windows = 6;
    double var_level = 0.01;
    double alpha = 0.10;
    int m_sims = 10000;
    std::uint64_t seed = 42;
    std::string output_path = "report";
    std::string output_format = "table";  // json | csv | table

    void apply(const std::map<std::string, std::string>& kv);
    void validate() const;
};

// Machine-readable report (schema_version 1) with every per-window TestReport,
// plus an aligned-text acceptance table. Deterministic for identical inputs.
std::string report_to_json(const AcceptanceTable& table, const std::vector<RunArchive>& archives,
                           const RunConfig& cfg);
std::string report_to_text(const AcceptanceTable& table);
std::string report_to_csv(const AcceptanceTable& table);

void emit_report(const AcceptanceTable& table, const std::vector<RunArchive>& archives,
                 const RunConfig& cfg);

// Re-parse of the JSON report, for round-trip checks and downstream tooling.
std::vector<TestReport> parse_report_json(const std::string& json_text);

int cli_main(int argc, char** argv);

}  // namespace lvar
