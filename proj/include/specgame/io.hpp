#pragma once
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specgame/analysis.hpp"
#include "specgame/experiments.hpp"
#include "specgame/types.hpp"

namespace specgame::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Locale-free, round-trip number formatting (std::to_chars).
std::string fmt(double v);
std::string fmt(int64_t v);

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

json config_to_json(const GameConfig& cfg);
GameConfig config_from_json(const json& j); // unknown keys rejected

json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const json& j);
SweepSpec load_sweep_spec(const fs::path& path);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

// Every CLI invocation writes one of these next to its artifacts.
json make_manifest(const std::string& command, const json& parameters);
void write_manifest(const fs::path& dir, const json& manifest);
json read_manifest(const fs::path& dir); // throws if missing

// ---------------------------------------------------------------------------
// CSV writers (one-line header, UTF-8, '\n' line ends)
// ---------------------------------------------------------------------------

void write_steps_csv(const fs::path& path, std::span<const StepRecord> steps);
void write_trades_csv(const fs::path& path, std::span<const TradeRecord> trades);
void write_wealth_csv(const fs::path& path, std::span<const int64_t> wealth);
void write_returns_csv(const fs::path& path, const ReturnSeries& returns);
void write_acf_csv(const fs::path& path, const AcfResult& acf);
void write_ccdf_csv(const fs::path& path,
                    const std::vector<std::pair<double, double>>& curve);
void write_horizon_gain_csv(const fs::path& path, const HorizonGainMap& map);
void write_trials_csv(const fs::path& path, std::span<const TrialStats> trials,
                      const SweepResult& result);
void write_cells_csv(const fs::path& path, const SweepResult& result);

// Optional gzip sink for raw per-trial logs.
void gzip_file(const fs::path& src, const fs::path& dst, bool remove_src);

// ---------------------------------------------------------------------------
// CSV readers
// ---------------------------------------------------------------------------

std::vector<StepRecord> read_steps_csv(const fs::path& path);
std::vector<TradeRecord> read_trades_csv(const fs::path& path);
std::vector<int64_t> read_wealth_csv(const fs::path& path);

// One numeric column from an arbitrary CSV. `column` may be empty (single
// column expected, optional header) or name a header field. Distinct errors
// for missing file, missing column and non-numeric cells.
std::vector<double> read_numeric_column(const fs::path& path, const std::string& column);

} // namespace specgame::io
