#pragma once
#include <filesystem>
#include <string>

#include "specgame/experiments.hpp"
#include "specgame/io.hpp"
#include "specgame/types.hpp"

namespace specgame {

namespace fs = std::filesystem;

// Implementation of the CLI subcommands. The binary in tools/ is a thin
// argument-parsing wrapper; tests drive these directly.

struct RunCommand {
    GameConfig config;
    fs::path out_dir;
    bool write_trades = true;
};

// Writes manifest.json, steps.csv, trades.csv, final_wealth.csv.
void cmd_run(const RunCommand& cmd);

struct SweepCommand {
    SweepSpec spec;
    fs::path out_dir;
    int jobs = 0;
    bool raw = false;        // per-trial step logs under raw/
    bool gzip_raw = false;
};

// Writes manifest.json, trials.csv, cells.csv and optional per-cell pooled
// wealth snapshots / raw logs.
void cmd_sweep(const SweepCommand& cmd);

struct AnalyzeCommand {
    fs::path run_dir;        // a directory produced by cmd_run
    fs::path out_dir;        // defaults to run_dir
    int max_lag = 1000;
    int fit_lo = 1;
    int fit_hi = 1000;
};

// Reads the run logs and writes returns.csv, acf.csv, wealth_ccdf.csv,
// stats.json and, when trades.csv exists, horizon_gain.csv + horizon_ccdf.csv.
void cmd_analyze(const AnalyzeCommand& cmd);

struct FitCommand {
    fs::path csv_path;
    std::string column;      // empty = single column
    fs::path out_dir;        // fit.json written here (empty = no file)
    size_t min_tail = 10;
    int n_bootstrap = 1000;
    uint64_t seed = 1;
    bool skip_gof = false;   // x_min scan + Vuong only
};

// Returns the fit JSON {alpha, x_min, ks, p_gof, vuong_lr, vuong_p}.
io::json cmd_fit(const FitCommand& cmd);

struct ReportCommand {
    fs::path dir;            // run or sweep directory (manifest decides)
    fs::path out_dir;        // defaults to dir
    int max_lag = 1000;
};

// Emits plot-ready per-figure CSVs plus summary.txt.
void cmd_report(const ReportCommand& cmd);

} // namespace specgame
