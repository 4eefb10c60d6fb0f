#include "specgame/experiments.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specgame/rng.hpp"

namespace specgame {

int TrialSet::n_failed() const {
    int n = 0;
    for (const auto& e : errors)
        if (!e.empty()) ++n;
    return n;
}

TrialSet run_trials(const GameConfig& config, int n_trials, uint64_t base_seed,
                    int jobs, const RunOptions& options) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    config.validate();

    TrialSet set;
    set.config = config;
    set.seeds.resize(static_cast<size_t>(n_trials));
    set.runs.resize(static_cast<size_t>(n_trials));
    set.errors.assign(static_cast<size_t>(n_trials), "");
    for (int k = 0; k < n_trials; ++k)
        set.seeds[static_cast<size_t>(k)] = mix_seed(base_seed, static_cast<uint64_t>(k));

#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
    const int threads = 1;
    (void)jobs;
#endif

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int k = 0; k < n_trials; ++k) {
        GameConfig cfg = config;
        cfg.seed = set.seeds[static_cast<size_t>(k)];
        try {
            set.runs[static_cast<size_t>(k)] = run(cfg, options);
        } catch (const std::exception& e) {
            set.errors[static_cast<size_t>(k)] = e.what();
        }
    }

    for (int k = 0; k < n_trials; ++k) {
        if (!set.errors[static_cast<size_t>(k)].empty()) continue;
        const auto& w = set.runs[static_cast<size_t>(k)].final_wealth;
        set.pooled_final_wealth.insert(set.pooled_final_wealth.end(), w.begin(), w.end());
    }
    return set;
}

void apply_param(GameConfig& cfg, const std::string& param, double value) {
    if (param == "N") cfg.n_players = static_cast<int32_t>(value);
    else if (param == "S") cfg.n_strategies = static_cast<int32_t>(value);
    else if (param == "M") cfg.memory = static_cast<int32_t>(value);
    else if (param == "B") cfg.board_lot = static_cast<int64_t>(value);
    else if (param == "C") cfg.cognitive_threshold = value;
    else if (param == "T") cfg.n_steps = static_cast<int64_t>(value);
    else if (param == "p0") cfg.initial_price = value;
    else throw std::invalid_argument("unknown sweep parameter '" + param +
                                     "' (expected N, S, M, B, C, T or p0)");
}

namespace {

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

} // namespace

SweepResult sweep(const SweepSpec& spec, int jobs) {
    if (spec.axes.empty() || spec.axes.size() > 2)
        throw std::invalid_argument("sweep needs one or two axes");
    for (const auto& ax : spec.axes)
        if (ax.values.empty())
            throw std::invalid_argument("sweep axis '" + ax.param + "' has no values");
    if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");

    SweepResult result;
    result.spec = spec;

    const size_t n0 = spec.axes[0].values.size();
    const size_t n1 = spec.axes.size() == 2 ? spec.axes[1].values.size() : 1;
    const int n_cells = static_cast<int>(n0 * n1);

    for (int cell = 0; cell < n_cells; ++cell) {
        GameConfig cfg = spec.base;
        SweepCell sc;
        sc.cell = cell;
        const size_t i0 = static_cast<size_t>(cell) / n1;
        const size_t i1 = static_cast<size_t>(cell) % n1;
        apply_param(cfg, spec.axes[0].param, spec.axes[0].values[i0]);
        sc.params.emplace_back(spec.axes[0].param, spec.axes[0].values[i0]);
        if (spec.axes.size() == 2) {
            apply_param(cfg, spec.axes[1].param, spec.axes[1].values[i1]);
            sc.params.emplace_back(spec.axes[1].param, spec.axes[1].values[i1]);
        }
        // Extreme M = 2 cells need a higher initial price for usable log
        // returns; only applied when the base config still has the default.
        if (cfg.memory == 2 && spec.base.initial_price == 100.0) cfg.initial_price = 10'000.0;
        sc.config = cfg;

        RunOptions opts;
        opts.collect_trades = false;
        TrialSet trials = run_trials(cfg, spec.n_trials,
                                     mix_seed(spec.base_seed, static_cast<uint64_t>(cell)),
                                     jobs, opts);

        std::vector<double> sig, kur, gin, taw, ah, ph, bu, se;
        for (int k = 0; k < spec.n_trials; ++k) {
            TrialStats ts;
            ts.cell = cell;
            ts.trial = k;
            ts.seed = trials.seeds[static_cast<size_t>(k)];
            ts.error = trials.errors[static_cast<size_t>(k)];
            ts.ok = ts.error.empty();
            if (ts.ok) {
                const RunOutput& out = trials.runs[static_cast<size_t>(k)];
                const auto dp = delta_p_series(out);
                ts.sigma = sigma(dp);
                ts.kurtosis = excess_kurtosis(dp);
                ts.gini = gini(std::span<const int64_t>(out.final_wealth));
                ts.time_avg_total_wealth = out.time_avg_total_wealth;
                ts.final_price = out.final_price;
                ts.actions = action_ratios(out.action_totals);
                sig.push_back(ts.sigma);
                kur.push_back(ts.kurtosis);
                gin.push_back(ts.gini);
                taw.push_back(ts.time_avg_total_wealth);
                ah.push_back(ts.actions.active_hold);
                ph.push_back(ts.actions.passive_hold);
                bu.push_back(ts.actions.buy);
                se.push_back(ts.actions.sell);
                ++sc.n_ok;
            } else {
                ++sc.n_failed;
            }
            result.trials.push_back(ts);
        }
        sc.mean_sigma = mean_of(sig);
        sc.log10_mean_sigma = sc.mean_sigma > 0 ? std::log10(sc.mean_sigma) : 0.0;
        sc.mean_kurtosis = mean_of(kur);
        sc.mean_gini = mean_of(gin);
        sc.mean_time_avg_total_wealth = mean_of(taw);
        sc.mean_actions = {mean_of(ah), mean_of(ph), mean_of(bu), mean_of(se)};
        sc.extreme = sc.mean_sigma > 10.0;
        if (spec.pool_wealth) sc.pooled_wealth = std::move(trials.pooled_final_wealth);
        result.cells.push_back(std::move(sc));
    }
    return result;
}

namespace {

void require_axes(const SweepSpec& spec, std::initializer_list<const char*> names,
                  const char* what) {
    if (spec.axes.size() != names.size())
        throw std::invalid_argument(std::string(what) + ": wrong number of axes");
    for (const char* name : names) {
        bool found = false;
        for (const auto& ax : spec.axes)
            if (ax.param == name) found = true;
        if (!found)
            throw std::invalid_argument(std::string(what) + ": missing axis '" + name + "'");
    }
}

} // namespace

SweepResult phase_diagram(const SweepSpec& spec, int jobs) {
    require_axes(spec, {"M", "B"}, "phase_diagram");
    return sweep(spec, jobs);
}

SweepResult gini_vs_B(const SweepSpec& spec, int jobs) {
    require_axes(spec, {"B"}, "gini_vs_B");
    return sweep(spec, jobs);
}

SweepResult kurtosis_vs_S(const SweepSpec& spec, int jobs) {
    require_axes(spec, {"S"}, "kurtosis_vs_S");
    return sweep(spec, jobs);
}

SweepResult kurtosis_vs_C(const SweepSpec& spec, int jobs) {
    require_axes(spec, {"C"}, "kurtosis_vs_C");
    return sweep(spec, jobs);
}

std::vector<AblationRun> ablation_suite(const GameConfig& config, int max_lag) {
    std::vector<AblationRun> out;
    for (Mode mode : {Mode::Standard, Mode::ExogenousHistory, Mode::RandomEntry}) {
        GameConfig cfg = config;
        cfg.mode = mode;
        AblationRun ab;
        ab.mode = mode;
        RunOptions opts;
        opts.collect_trades = false;
        ab.output = run(cfg, opts);
        const auto prices = price_series(ab.output);
        ab.returns = log_returns(prices);
        const int lag = std::min<int>(max_lag, static_cast<int>(ab.returns.values.size()) / 2);
        ab.acf = volatility_autocorrelation(ab.returns, lag);
        out.push_back(std::move(ab));
    }
    return out;
}

} // namespace specgame
