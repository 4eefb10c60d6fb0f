#include "specgame/io.hpp"

#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "specgame/rng.hpp"
#include "specgame/version.hpp"

namespace specgame::io {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const fs::path& path, size_t line_no) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw std::runtime_error("non-numeric value '" + t + "' in " + path.string() +
                                 " line " + std::to_string(line_no));
    return v;
}

int64_t parse_i64(const std::string& s, const fs::path& path, size_t line_no) {
    const std::string t = trim(s);
    int64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw std::runtime_error("non-integer value '" + t + "' in " + path.string() +
                                 " line " + std::to_string(line_no));
    return v;
}

bool is_numeric(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

} // namespace

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

json config_to_json(const GameConfig& cfg) {
    return json{{"N", cfg.n_players},
                {"S", cfg.n_strategies},
                {"M", cfg.memory},
                {"B", cfg.board_lot},
                {"C", cfg.cognitive_threshold},
                {"T", cfg.n_steps},
                {"p0", cfg.initial_price},
                {"seed", cfg.seed},
                {"mode", mode_name(cfg.mode)},
                {"random_entry_prob", cfg.random_entry_prob}};
}

GameConfig config_from_json(const json& j) {
    GameConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "N") cfg.n_players = value.get<int32_t>();
        else if (key == "S") cfg.n_strategies = value.get<int32_t>();
        else if (key == "M") cfg.memory = value.get<int32_t>();
        else if (key == "B") cfg.board_lot = value.get<int64_t>();
        else if (key == "C") cfg.cognitive_threshold = value.get<double>();
        else if (key == "T") cfg.n_steps = value.get<int64_t>();
        else if (key == "p0") cfg.initial_price = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<uint64_t>();
        else if (key == "mode") cfg.mode = mode_from_name(value.get<std::string>());
        else if (key == "random_entry_prob") cfg.random_entry_prob = value.get<double>();
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return cfg;
}

json sweep_spec_to_json(const SweepSpec& spec) {
    json axes = json::array();
    for (const auto& ax : spec.axes)
        axes.push_back(json{{"param", ax.param}, {"values", ax.values}});
    return json{{"base", config_to_json(spec.base)},
                {"axes", axes},
                {"trials", spec.n_trials},
                {"base_seed", spec.base_seed},
                {"pool_wealth", spec.pool_wealth}};
}

SweepSpec sweep_spec_from_json(const json& j) {
    SweepSpec spec;
    if (j.contains("base")) spec.base = config_from_json(j.at("base"));
    if (j.contains("axes"))
        for (const auto& ax : j.at("axes"))
            spec.axes.push_back({ax.at("param").get<std::string>(),
                                 ax.at("values").get<std::vector<double>>()});
    if (j.contains("trials")) spec.n_trials = j.at("trials").get<int>();
    if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<uint64_t>();
    if (j.contains("pool_wealth")) spec.pool_wealth = j.at("pool_wealth").get<bool>();
    return spec;
}

SweepSpec load_sweep_spec(const fs::path& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    return sweep_spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

json make_manifest(const std::string& command, const json& parameters) {
    const auto now = std::chrono::system_clock::now();
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return json{{"command", command},
                {"version", kVersion},
                {"prng", kPrngName},
                {"seed_mix", kSeedMixName},
                {"parameters", parameters},
                {"unix_time", secs}};
}

void write_manifest(const fs::path& dir, const json& manifest) {
    fs::create_directories(dir);
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

json read_manifest(const fs::path& dir) {
    const fs::path p = dir / "manifest.json";
    if (!fs::exists(p)) throw std::runtime_error("missing manifest: " + p.string());
    auto in = open_in(p);
    json j;
    in >> j;
    return j;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

void write_steps_csv(const fs::path& path, std::span<const StepRecord> steps) {
    auto out = open_out(path);
    out << "t,delta_p,price,h,active_hold,passive_hold,buy,sell,"
           "big,medium,small,n_replacements\n";
    std::string line;
    for (const auto& s : steps) {
        line.clear();
        line += fmt(s.t); line += ',';
        line += fmt(s.delta_p); line += ',';
        line += fmt(s.price); line += ',';
        line += fmt(static_cast<int64_t>(s.h)); line += ',';
        line += fmt(static_cast<int64_t>(s.active_hold)); line += ',';
        line += fmt(static_cast<int64_t>(s.passive_hold)); line += ',';
        line += fmt(static_cast<int64_t>(s.buys)); line += ',';
        line += fmt(static_cast<int64_t>(s.sells)); line += ',';
        line += fmt(static_cast<int64_t>(s.big_orders)); line += ',';
        line += fmt(static_cast<int64_t>(s.medium_orders)); line += ',';
        line += fmt(static_cast<int64_t>(s.small_orders)); line += ',';
        line += fmt(static_cast<int64_t>(s.n_replacements)); line += '\n';
        out << line;
    }
}

void write_trades_csv(const fs::path& path, std::span<const TradeRecord> trades) {
    auto out = open_out(path);
    out << "player_id,direction,open_time,close_time,quantity,"
           "strategy_gain,wealth_delta,caused_bankruptcy\n";
    std::string line;
    for (const auto& tr : trades) {
        line.clear();
        line += fmt(static_cast<int64_t>(tr.player_id)); line += ',';
        line += fmt(static_cast<int64_t>(tr.direction)); line += ',';
        line += fmt(tr.open_time); line += ',';
        line += fmt(tr.close_time); line += ',';
        line += fmt(tr.quantity); line += ',';
        line += fmt(tr.strategy_gain); line += ',';
        line += fmt(tr.wealth_delta); line += ',';
        line += (tr.caused_bankruptcy ? '1' : '0'); line += '\n';
        out << line;
    }
}

void write_wealth_csv(const fs::path& path, std::span<const int64_t> wealth) {
    auto out = open_out(path);
    out << "wealth\n";
    for (int64_t w : wealth) out << fmt(w) << "\n";
}

void write_returns_csv(const fs::path& path, const ReturnSeries& returns) {
    auto out = open_out(path);
    out << "t,r,valid\n";
    for (size_t i = 0; i < returns.values.size(); ++i) {
        out << fmt(static_cast<int64_t>(i + 1)) << ','
            << (returns.valid[i] ? fmt(returns.values[i]) : std::string("nan")) << ','
            << (returns.valid[i] ? '1' : '0') << "\n";
    }
}

void write_acf_csv(const fs::path& path, const AcfResult& acf) {
    auto out = open_out(path);
    out << "lag,rho\n";
    for (size_t i = 0; i < acf.lags.size(); ++i)
        out << fmt(static_cast<int64_t>(acf.lags[i])) << ',' << fmt(acf.rho[i]) << "\n";
}

void write_ccdf_csv(const fs::path& path,
                    const std::vector<std::pair<double, double>>& curve) {
    auto out = open_out(path);
    out << "x,ccdf\n";
    for (const auto& [x, f] : curve) out << fmt(x) << ',' << fmt(f) << "\n";
}

void write_horizon_gain_csv(const fs::path& path, const HorizonGainMap& map) {
    auto out = open_out(path);
    out << "horizon,strategy_gain,count\n";
    for (const auto& [key, count] : map)
        out << fmt(key.first) << ',' << fmt(key.second) << ','
            << fmt(static_cast<int64_t>(count)) << "\n";
}

void write_trials_csv(const fs::path& path, std::span<const TrialStats> trials,
                      const SweepResult& result) {
    auto out = open_out(path);
    std::string header = "cell";
    for (const auto& ax : result.spec.axes) header += "," + ax.param;
    header += ",trial,seed,ok,sigma,kurtosis,gini,time_avg_total_wealth,final_price,"
              "active_hold,passive_hold,buy,sell,error\n";
    out << header;
    for (const auto& t : trials) {
        const auto& cell = result.cells[static_cast<size_t>(t.cell)];
        out << fmt(static_cast<int64_t>(t.cell));
        for (const auto& [name, value] : cell.params) out << ',' << fmt(value);
        out << ',' << fmt(static_cast<int64_t>(t.trial)) << ','
            << std::to_string(t.seed) << ',' << (t.ok ? '1' : '0') << ','
            << fmt(t.sigma) << ',' << fmt(t.kurtosis) << ',' << fmt(t.gini) << ','
            << fmt(t.time_avg_total_wealth) << ',' << fmt(t.final_price) << ','
            << fmt(t.actions.active_hold) << ',' << fmt(t.actions.passive_hold) << ','
            << fmt(t.actions.buy) << ',' << fmt(t.actions.sell) << ','
            << t.error << "\n";
    }
}

void write_cells_csv(const fs::path& path, const SweepResult& result) {
    auto out = open_out(path);
    std::string header = "cell";
    for (const auto& ax : result.spec.axes) header += "," + ax.param;
    header += ",n_ok,n_failed,mean_sigma,log10_mean_sigma,extreme,mean_kurtosis,"
              "mean_gini,mean_time_avg_total_wealth,"
              "mean_active_hold,mean_passive_hold,mean_buy,mean_sell\n";
    out << header;
    for (const auto& c : result.cells) {
        out << fmt(static_cast<int64_t>(c.cell));
        for (const auto& [name, value] : c.params) out << ',' << fmt(value);
        out << ',' << fmt(static_cast<int64_t>(c.n_ok)) << ','
            << fmt(static_cast<int64_t>(c.n_failed)) << ','
            << fmt(c.mean_sigma) << ',' << fmt(c.log10_mean_sigma) << ','
            << (c.extreme ? '1' : '0') << ',' << fmt(c.mean_kurtosis) << ','
            << fmt(c.mean_gini) << ',' << fmt(c.mean_time_avg_total_wealth) << ','
            << fmt(c.mean_actions.active_hold) << ',' << fmt(c.mean_actions.passive_hold) << ','
            << fmt(c.mean_actions.buy) << ',' << fmt(c.mean_actions.sell) << "\n";
    }
}

void gzip_file(const fs::path& src, const fs::path& dst, bool remove_src) {
    auto in = open_in(src);
    gzFile gz = gzopen(dst.string().c_str(), "wb");
    if (!gz) throw std::runtime_error("cannot open for writing: " + dst.string());
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const int n = static_cast<int>(in.gcount());
        if (gzwrite(gz, buf, static_cast<unsigned>(n)) != n) {
            gzclose(gz);
            throw std::runtime_error("gzip write failed: " + dst.string());
        }
    }
    gzclose(gz);
    if (remove_src) fs::remove(src);
}

// ---------------------------------------------------------------------------
// CSV readers
// ---------------------------------------------------------------------------

std::vector<StepRecord> read_steps_csv(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    std::vector<StepRecord> steps;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 12)
            throw std::runtime_error("bad step row in " + path.string() + " line " +
                                     std::to_string(line_no));
        StepRecord s;
        s.t = parse_i64(f[0], path, line_no);
        s.delta_p = parse_double(f[1], path, line_no);
        s.price = parse_double(f[2], path, line_no);
        s.h = static_cast<Digit>(parse_i64(f[3], path, line_no));
        s.active_hold = static_cast<int32_t>(parse_i64(f[4], path, line_no));
        s.passive_hold = static_cast<int32_t>(parse_i64(f[5], path, line_no));
        s.buys = static_cast<int32_t>(parse_i64(f[6], path, line_no));
        s.sells = static_cast<int32_t>(parse_i64(f[7], path, line_no));
        s.big_orders = static_cast<int32_t>(parse_i64(f[8], path, line_no));
        s.medium_orders = static_cast<int32_t>(parse_i64(f[9], path, line_no));
        s.small_orders = static_cast<int32_t>(parse_i64(f[10], path, line_no));
        s.n_replacements = static_cast<int32_t>(parse_i64(f[11], path, line_no));
        steps.push_back(s);
    }
    return steps;
}

std::vector<TradeRecord> read_trades_csv(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    std::vector<TradeRecord> trades;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8)
            throw std::runtime_error("bad trade row in " + path.string() + " line " +
                                     std::to_string(line_no));
        TradeRecord t;
        t.player_id = static_cast<int32_t>(parse_i64(f[0], path, line_no));
        t.direction = static_cast<Action>(parse_i64(f[1], path, line_no));
        t.open_time = parse_i64(f[2], path, line_no);
        t.close_time = parse_i64(f[3], path, line_no);
        t.quantity = parse_i64(f[4], path, line_no);
        t.strategy_gain = parse_i64(f[5], path, line_no);
        t.wealth_delta = parse_i64(f[6], path, line_no);
        t.caused_bankruptcy = parse_i64(f[7], path, line_no) != 0;
        trades.push_back(t);
    }
    return trades;
}

std::vector<int64_t> read_wealth_csv(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    std::vector<int64_t> wealth;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        wealth.push_back(parse_i64(line, path, line_no));
    }
    return wealth;
}

std::vector<double> read_numeric_column(const fs::path& path, const std::string& column) {
    if (!fs::exists(path)) throw std::runtime_error("no such file: " + path.string());
    auto in = open_in(path);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    if (rows.empty()) throw std::runtime_error("empty file: " + path.string());

    size_t col = 0;
    size_t first_row = 0;
    const auto header = split_csv_line(rows[0]);
    if (!column.empty()) {
        bool found = false;
        for (size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == column) {
                col = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error("column '" + column + "' not found in " + path.string());
        first_row = 1;
    } else {
        if (header.size() != 1)
            throw std::runtime_error(path.string() +
                                     " has multiple columns; pass --column to pick one");
        if (!is_numeric(header[0])) first_row = 1; // optional header
    }

    std::vector<double> values;
    for (size_t r = first_row; r < rows.size(); ++r) {
        const auto f = split_csv_line(rows[r]);
        if (col >= f.size())
            throw std::runtime_error("short row in " + path.string() + " line " +
                                     std::to_string(r + 1));
        values.push_back(parse_double(f[col], path, r + 1));
    }
    if (values.empty()) throw std::runtime_error("no numeric rows in " + path.string());
    return values;
}

} // namespace specgame::io
