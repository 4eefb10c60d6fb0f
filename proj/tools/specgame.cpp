// Command-line surface of the Speculation Game simulator. Subcommands:
//   run      one game, writes step/trade/wealth logs
//   sweep    parameter sweep from a JSON spec
//   analyze  statistics tables for a finished run directory
//   fit      power-law tail fit of a numeric CSV column
//   report   plot-ready figure tables plus a text summary
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specgame/commands.hpp"
#include "specgame/version.hpp"

namespace {

using namespace specgame;

fs::path default_out(const char* subcommand) {
    const char* root = std::getenv("SPECGAME_OUT");
    return fs::path(root ? root : "out") / subcommand;
}

// Config flags shared by `run`. Only flags the user actually passed override
// values loaded from --config.
struct ConfigFlags {
    std::string config_path;
    GameConfig values;
    std::string mode = "standard";
    CLI::Option* opt_n = nullptr;
    CLI::Option* opt_s = nullptr;
    CLI::Option* opt_m = nullptr;
    CLI::Option* opt_b = nullptr;
    CLI::Option* opt_c = nullptr;
    CLI::Option* opt_t = nullptr;
    CLI::Option* opt_p0 = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_mode = nullptr;
    CLI::Option* opt_rep = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "config JSON file (flags override)");
        opt_n = app->add_option("--N", values.n_players, "number of players");
        opt_s = app->add_option("--S", values.n_strategies, "strategies per player");
        opt_m = app->add_option("--M", values.memory, "memory length");
        opt_b = app->add_option("--B", values.board_lot, "board lot amount");
        opt_c = app->add_option("--C", values.cognitive_threshold, "cognitive threshold");
        opt_t = app->add_option("--T", values.n_steps, "number of steps");
        opt_p0 = app->add_option("--p0", values.initial_price, "initial price");
        opt_seed = app->add_option("--seed", values.seed, "RNG seed");
        opt_mode = app->add_option("--mode", mode, "standard | exogenous | random-entry");
        opt_rep = app->add_option("--random-entry-prob", values.random_entry_prob,
                                  "open/close probability in random-entry mode");
    }

    GameConfig resolve() const {
        GameConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot read config: " + config_path);
            io::json j;
            in >> j;
            cfg = io::config_from_json(j);
        }
        if (opt_n->count()) cfg.n_players = values.n_players;
        if (opt_s->count()) cfg.n_strategies = values.n_strategies;
        if (opt_m->count()) cfg.memory = values.memory;
        if (opt_b->count()) cfg.board_lot = values.board_lot;
        if (opt_c->count()) cfg.cognitive_threshold = values.cognitive_threshold;
        if (opt_t->count()) cfg.n_steps = values.n_steps;
        if (opt_p0->count()) cfg.initial_price = values.initial_price;
        if (opt_seed->count()) cfg.seed = values.seed;
        if (opt_mode->count()) cfg.mode = mode_from_name(mode);
        if (opt_rep->count()) cfg.random_entry_prob = values.random_entry_prob;
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"specgame: Speculation Game market simulator and statistics toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "max worker threads (0 = all available)");

    // run
    auto* run_app = app.add_subcommand("run", "execute one game run");
    ConfigFlags cf;
    cf.attach(run_app);
    std::string run_out;
    bool no_trades = false;
    run_app->add_option("--out", run_out, "output directory");
    run_app->add_flag("--no-trades", no_trades, "skip the trade log (large runs)");

    // sweep
    auto* sweep_app = app.add_subcommand("sweep", "run a parameter sweep");
    std::string spec_path, sweep_out;
    bool raw = false, gzip_raw = false, pool_wealth = false;
    int sweep_trials = -1;
    sweep_app->add_option("--spec", spec_path, "sweep spec JSON")->required();
    sweep_app->add_option("--out", sweep_out, "output directory");
    sweep_app->add_option("--trials", sweep_trials, "override trials per cell");
    sweep_app->add_flag("--pool-wealth", pool_wealth, "write pooled wealth snapshots per cell");
    sweep_app->add_flag("--raw", raw, "write raw per-trial step logs");
    sweep_app->add_flag("--gzip-raw", gzip_raw, "gzip the raw logs");

    // analyze
    auto* an_app = app.add_subcommand("analyze", "statistics tables for a run directory");
    std::string an_run, an_out;
    int max_lag = 1000, fit_lo = 1, fit_hi = 1000;
    an_app->add_option("--run", an_run, "run directory")->required();
    an_app->add_option("--out", an_out, "output directory (default: run dir)");
    an_app->add_option("--max-lag", max_lag, "ACF lag range");
    an_app->add_option("--fit-lo", fit_lo, "log-fit window lower lag");
    an_app->add_option("--fit-hi", fit_hi, "log-fit window upper lag");

    // fit
    auto* fit_app = app.add_subcommand("fit", "power-law tail fit of a CSV column");
    std::string fit_csv, fit_column, fit_out;
    int n_bootstrap = 1000;
    uint64_t fit_seed = 1;
    size_t min_tail = 10;
    bool skip_gof = false;
    fit_app->add_option("--csv", fit_csv, "input CSV")->required();
    fit_app->add_option("--column", fit_column, "column name (default: single column)");
    fit_app->add_option("--out", fit_out, "directory for fit.json");
    fit_app->add_option("--bootstrap", n_bootstrap, "goodness-of-fit replicates");
    fit_app->add_option("--seed", fit_seed, "bootstrap seed");
    fit_app->add_option("--min-tail", min_tail, "minimum tail size");
    fit_app->add_flag("--no-gof", skip_gof, "skip the bootstrap goodness-of-fit");

    // report
    auto* rep_app = app.add_subcommand("report", "figure tables + summary for a directory");
    std::string rep_dir, rep_out;
    rep_app->add_option("--dir", rep_dir, "run or sweep directory")->required();
    rep_app->add_option("--out", rep_out, "output directory (default: input dir)");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#endif

    try {
        if (*run_app) {
            RunCommand cmd;
            cmd.config = cf.resolve();
            cmd.out_dir = run_out.empty() ? default_out("run") : fs::path(run_out);
            cmd.write_trades = !no_trades;
            cmd_run(cmd);
            std::cout << "run written to " << cmd.out_dir.string() << "\n";
        } else if (*sweep_app) {
            SweepCommand cmd;
            cmd.spec = io::load_sweep_spec(spec_path);
            if (sweep_trials > 0) cmd.spec.n_trials = sweep_trials;
            if (pool_wealth) cmd.spec.pool_wealth = true;
            cmd.out_dir = sweep_out.empty() ? default_out("sweep") : fs::path(sweep_out);
            cmd.jobs = jobs;
            cmd.raw = raw;
            cmd.gzip_raw = gzip_raw;
            cmd_sweep(cmd);
            std::cout << "sweep written to " << cmd.out_dir.string() << "\n";
        } else if (*an_app) {
            AnalyzeCommand cmd;
            cmd.run_dir = an_run;
            cmd.out_dir = an_out;
            cmd.max_lag = max_lag;
            cmd.fit_lo = fit_lo;
            cmd.fit_hi = fit_hi;
            cmd_analyze(cmd);
            std::cout << "analysis written to "
                      << (an_out.empty() ? an_run : an_out) << "\n";
        } else if (*fit_app) {
            FitCommand cmd;
            cmd.csv_path = fit_csv;
            cmd.column = fit_column;
            cmd.out_dir = fit_out;
            cmd.n_bootstrap = n_bootstrap;
            cmd.seed = fit_seed;
            cmd.min_tail = min_tail;
            cmd.skip_gof = skip_gof;
            std::cout << cmd_fit(cmd).dump(2) << "\n";
        } else if (*rep_app) {
            ReportCommand cmd;
            cmd.dir = rep_dir;
            cmd.out_dir = rep_out;
            cmd_report(cmd);
            std::cout << "report written to "
                      << (rep_out.empty() ? rep_dir : rep_out) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
