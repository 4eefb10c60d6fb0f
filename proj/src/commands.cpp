#include "specgame/commands.hpp"

#include <fstream>
#include <sstream>

#include "specgame/powerlaw.hpp"

namespace specgame {

using io::json;

void cmd_run(const RunCommand& cmd) {
    cmd.config.validate();
    fs::create_directories(cmd.out_dir);

    RunOptions opts;
    opts.collect_trades = cmd.write_trades;
    RunOutput out = run(cmd.config, opts);

    io::write_manifest(cmd.out_dir,
                       io::make_manifest("run", json{{"config", io::config_to_json(cmd.config)}}));
    io::write_steps_csv(cmd.out_dir / "steps.csv", out.steps);
    if (cmd.write_trades) io::write_trades_csv(cmd.out_dir / "trades.csv", out.trades);
    io::write_wealth_csv(cmd.out_dir / "final_wealth.csv", out.final_wealth);
}

void cmd_sweep(const SweepCommand& cmd) {
    fs::create_directories(cmd.out_dir);
    SweepResult result = sweep(cmd.spec, cmd.jobs);

    io::write_manifest(cmd.out_dir,
                       io::make_manifest("sweep",
                                         json{{"spec", io::sweep_spec_to_json(cmd.spec)},
                                              {"jobs", cmd.jobs}}));
    io::write_trials_csv(cmd.out_dir / "trials.csv", result.trials, result);
    io::write_cells_csv(cmd.out_dir / "cells.csv", result);

    if (cmd.spec.pool_wealth) {
        for (const auto& cell : result.cells) {
            std::string name = "wealth_cell" + std::to_string(cell.cell);
            for (const auto& [param, value] : cell.params)
                name += "_" + param + io::fmt(value);
            io::write_wealth_csv(cmd.out_dir / (name + ".csv"), cell.pooled_wealth);
        }
    }

    if (cmd.raw) {
        const fs::path raw_dir = cmd.out_dir / "raw";
        fs::create_directories(raw_dir);
        for (const auto& cell : result.cells) {
            RunOptions opts;
            opts.collect_trades = false;
            TrialSet trials = run_trials(cell.config, cmd.spec.n_trials,
                                         mix_seed(cmd.spec.base_seed,
                                                  static_cast<uint64_t>(cell.cell)),
                                         cmd.jobs, opts);
            for (int k = 0; k < cmd.spec.n_trials; ++k) {
                if (!trials.errors[static_cast<size_t>(k)].empty()) continue;
                const fs::path p = raw_dir / ("steps_cell" + std::to_string(cell.cell) +
                                              "_trial" + std::to_string(k) + ".csv");
                io::write_steps_csv(p, trials.runs[static_cast<size_t>(k)].steps);
                if (cmd.gzip_raw) io::gzip_file(p, p.string() + ".gz", true);
            }
        }
    }
}

namespace {

json run_stats_json(const std::vector<StepRecord>& steps,
                    const std::vector<int64_t>& wealth, const AcfResult& acf) {
    std::vector<double> dp;
    dp.reserve(steps.size());
    for (const auto& s : steps) dp.push_back(s.delta_p);
    const auto actions = action_ratios(std::span<const StepRecord>(steps));

    uint64_t big = 0, medium = 0, small = 0;
    for (const auto& s : steps) {
        big += static_cast<uint64_t>(s.big_orders);
        medium += static_cast<uint64_t>(s.medium_orders);
        small += static_cast<uint64_t>(s.small_orders);
    }

    json j{{"sigma", sigma(dp)},
           {"kurtosis", excess_kurtosis(dp)},
           {"gini_final_wealth", gini(std::span<const int64_t>(wealth))},
           {"action_ratios",
            json{{"active_hold", actions.active_hold},
                 {"passive_hold", actions.passive_hold},
                 {"buy", actions.buy},
                 {"sell", actions.sell}}},
           {"order_totals", json{{"big", big}, {"medium", medium}, {"small", small}}}};
    if (acf.fit) {
        j["acf_log_fit"] = json{{"slope", acf.fit->slope},
                                {"intercept", acf.fit->intercept},
                                {"r_squared", acf.fit->r_squared}};
    }
    return j;
}

} // namespace

void cmd_analyze(const AnalyzeCommand& cmd) {
    const json manifest = io::read_manifest(cmd.run_dir);
    if (manifest.at("command").get<std::string>() != "run")
        throw std::runtime_error("analyze expects a run directory: " + cmd.run_dir.string());
    const GameConfig cfg =
        io::config_from_json(manifest.at("parameters").at("config"));

    const fs::path out_dir = cmd.out_dir.empty() ? cmd.run_dir : cmd.out_dir;
    fs::create_directories(out_dir);

    const auto steps = io::read_steps_csv(cmd.run_dir / "steps.csv");
    const auto wealth = io::read_wealth_csv(cmd.run_dir / "final_wealth.csv");

    std::vector<double> prices;
    prices.reserve(steps.size() + 1);
    prices.push_back(cfg.initial_price);
    for (const auto& s : steps) prices.push_back(s.price);

    const ReturnSeries returns = log_returns(prices);
    io::write_returns_csv(out_dir / "returns.csv", returns);

    const int max_lag =
        std::min<int>(cmd.max_lag, static_cast<int>(returns.values.size()) / 2);
    AcfResult acf = volatility_autocorrelation(returns, max_lag);
    try {
        acf_log_fit(acf, cmd.fit_lo, std::min(cmd.fit_hi, max_lag));
    } catch (const std::exception&) {
        // Window can be degenerate on tiny runs; the table is still useful.
    }
    io::write_acf_csv(out_dir / "acf.csv", acf);

    io::write_ccdf_csv(out_dir / "wealth_ccdf.csv",
                       ccdf(std::span<const int64_t>(wealth)));

    if (fs::exists(cmd.run_dir / "trades.csv")) {
        const auto trades = io::read_trades_csv(cmd.run_dir / "trades.csv");
        if (!trades.empty()) {
            io::write_horizon_gain_csv(out_dir / "horizon_gain.csv", horizon_gain_map(trades));
            io::write_ccdf_csv(out_dir / "horizon_ccdf.csv", horizon_distribution(trades));
        }
    }

    std::ofstream stats(out_dir / "stats.json");
    stats << run_stats_json(steps, wealth, acf).dump(2) << "\n";
}

json cmd_fit(const FitCommand& cmd) {
    const auto values = io::read_numeric_column(cmd.csv_path, cmd.column);
    using namespace powerlaw;
    const PowerLawFit fit = scan_xmin(values, cmd.min_tail);
    const VuongResult vuong = vuong_test(values, fit.x_min, cmd.min_tail);
    json j{{"alpha", fit.alpha},
           {"x_min", fit.x_min},
           {"ks", fit.ks_distance},
           {"n_tail", fit.n_tail},
           {"vuong_lr", vuong.likelihood_ratio},
           {"vuong_p", vuong.p_value},
           {"vuong_preferred", preferred_name(vuong.preferred)}};
    if (cmd.skip_gof) {
        j["p_gof"] = nullptr;
    } else {
        const GofResult gof = goodness_of_fit(values, fit, cmd.n_bootstrap, cmd.seed,
                                              cmd.min_tail);
        j["p_gof"] = gof.p_value;
        j["n_bootstrap"] = gof.n_bootstrap;
    }
    if (!cmd.out_dir.empty()) {
        fs::create_directories(cmd.out_dir);
        std::ofstream out(cmd.out_dir / "fit.json");
        out << j.dump(2) << "\n";
    }
    return j;
}

void cmd_report(const ReportCommand& cmd) {
    const json manifest = io::read_manifest(cmd.dir);
    const std::string command = manifest.at("command").get<std::string>();
    const fs::path out_dir = cmd.out_dir.empty() ? cmd.dir : cmd.out_dir;
    fs::create_directories(out_dir);

    std::ostringstream summary;
    summary << "specgame report\n================\n";

    if (command == "run") {
        AnalyzeCommand an;
        an.run_dir = cmd.dir;
        an.out_dir = out_dir;
        an.max_lag = cmd.max_lag;
        cmd_analyze(an);

        std::ifstream stats_in(out_dir / "stats.json");
        json stats;
        stats_in >> stats;
        const GameConfig cfg =
            io::config_from_json(manifest.at("parameters").at("config"));
        summary << "single run, mode " << mode_name(cfg.mode) << ", N=" << cfg.n_players
                << " S=" << cfg.n_strategies << " M=" << cfg.memory << " B=" << cfg.board_lot
                << " C=" << cfg.cognitive_threshold << " T=" << cfg.n_steps
                << " seed=" << cfg.seed << "\n\n";
        summary << "sigma(delta_p)       " << stats.at("sigma").get<double>() << "\n";
        summary << "excess kurtosis      " << stats.at("kurtosis").get<double>() << "\n";
        summary << "gini(final wealth)   " << stats.at("gini_final_wealth").get<double>() << "\n";
        const auto& a = stats.at("action_ratios");
        summary << "action ratios        active_hold " << a.at("active_hold").get<double>()
                << ", passive_hold " << a.at("passive_hold").get<double>() << ", buy "
                << a.at("buy").get<double>() << ", sell " << a.at("sell").get<double>() << "\n";
        if (stats.contains("acf_log_fit")) {
            const auto& f = stats.at("acf_log_fit");
            summary << "acf log fit          rho = " << f.at("slope").get<double>()
                    << " ln(tau) + " << f.at("intercept").get<double>()
                    << "  (R^2 = " << f.at("r_squared").get<double>() << ")\n";
        }
        summary << "\ntables: returns.csv acf.csv wealth_ccdf.csv";
        if (fs::exists(out_dir / "horizon_gain.csv"))
            summary << " horizon_gain.csv horizon_ccdf.csv";
        summary << "\n";
    } else if (command == "sweep") {
        if (!fs::exists(cmd.dir / "cells.csv"))
            throw std::runtime_error("sweep directory lacks cells.csv: " + cmd.dir.string());
        const SweepSpec spec =
            io::sweep_spec_from_json(manifest.at("parameters").at("spec"));
        summary << "sweep over";
        for (const auto& ax : spec.axes) summary << " " << ax.param;
        summary << ", " << spec.n_trials << " trials per cell\n\n";

        std::ifstream cells_in(cmd.dir / "cells.csv");
        std::string line;
        while (std::getline(cells_in, line)) summary << line << "\n";
        if (out_dir != cmd.dir) fs::copy_file(cmd.dir / "cells.csv", out_dir / "cells.csv",
                                              fs::copy_options::overwrite_existing);
    } else {
        throw std::runtime_error("unknown manifest command '" + command + "'");
    }

    std::ofstream out(out_dir / "summary.txt");
    out << summary.str();
}

} // namespace specgame
