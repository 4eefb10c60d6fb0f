#pragma once
#include <optional>
#include <string>
#include <vector>

#include "specgame/analysis.hpp"
#include "specgame/engine.hpp"

namespace specgame {

// ---------------------------------------------------------------------------
// Multi-trial runs
// ---------------------------------------------------------------------------

struct TrialSet {
    GameConfig config;                       // base config (seed field unused)
    std::vector<uint64_t> seeds;             // seed of trial k = mix(base_seed, k)
    std::vector<RunOutput> runs;             // empty RunOutput for failed trials
    std::vector<std::string> errors;         // "" for successful trials
    std::vector<int64_t> pooled_final_wealth; // successful trials, trial order

    int n_failed() const;
};

// Runs n_trials independent games; trial k is seeded with
// mix(base_seed, k). Trials execute in the OpenMP pool (capped by `jobs`,
// 0 = library default) and are merged by index, so the result is identical
// for any schedule. Failed trials (SimError and friends) are recorded, not
// thrown.
TrialSet run_trials(const GameConfig& config, int n_trials, uint64_t base_seed,
                    int jobs = 0, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepAxis {
    std::string param;            // one of N, S, M, B, C, T, p0
    std::vector<double> values;
};

struct SweepSpec {
    GameConfig base;
    std::vector<SweepAxis> axes;  // one or two axes
    int n_trials = 1;
    uint64_t base_seed = 1;
    bool pool_wealth = false;     // keep per-cell pooled final-wealth snapshots
};

// Applies one axis value to a config field; throws on unknown parameter.
void apply_param(GameConfig& cfg, const std::string& param, double value);

struct TrialStats {
    int cell = 0;
    int trial = 0;
    uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double sigma = 0.0;
    double kurtosis = 0.0;
    double gini = 0.0;
    double time_avg_total_wealth = 0.0;
    double final_price = 0.0;
    ActionFractions actions;
};

struct SweepCell {
    int cell = 0;
    std::vector<std::pair<std::string, double>> params; // axis name -> value
    GameConfig config;
    int n_ok = 0;
    int n_failed = 0;
    double mean_sigma = 0.0;
    double log10_mean_sigma = 0.0;
    double mean_kurtosis = 0.0;
    double mean_gini = 0.0;
    double mean_time_avg_total_wealth = 0.0;
    ActionFractions mean_actions;
    bool extreme = false;         // mean sigma > 10
    std::vector<int64_t> pooled_wealth; // when SweepSpec::pool_wealth
};

struct SweepResult {
    SweepSpec spec;
    std::vector<TrialStats> trials;
    std::vector<SweepCell> cells;
};

// Generic sweep: cartesian product of the axes, n_trials per cell, per-cell
// statistics aggregated from per-trial values. Cell k of an M axis with
// M = 2 defaults initial_price to 10,000 when the base still carries the
// standard 100 (extreme states need headroom for log returns).
SweepResult sweep(const SweepSpec& spec, int jobs = 0);

// Figure-specific wrappers. Each validates the axes and returns the generic
// sweep result; callers read the relevant columns.
SweepResult phase_diagram(const SweepSpec& spec, int jobs = 0);   // axes M, B; mean sigma
SweepResult gini_vs_B(const SweepSpec& spec, int jobs = 0);       // axis B; mean Gini
SweepResult kurtosis_vs_S(const SweepSpec& spec, int jobs = 0);   // axis S
SweepResult kurtosis_vs_C(const SweepSpec& spec, int jobs = 0);   // axis C

// ---------------------------------------------------------------------------
// Ablations
// ---------------------------------------------------------------------------

struct AblationRun {
    Mode mode = Mode::Standard;
    RunOutput output;
    ReturnSeries returns;
    AcfResult acf;
};

// Standard / ExogenousHistory / RandomEntry runs differing only in mode,
// same seed, each with its return series and volatility ACF.
std::vector<AblationRun> ablation_suite(const GameConfig& config, int max_lag = 1000);

} // namespace specgame
