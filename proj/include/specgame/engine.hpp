#pragma once
#include <functional>
#include <span>

#include "specgame/rng.hpp"
#include "specgame/types.hpp"

namespace specgame {

// ---------------------------------------------------------------------------
// Rule kernels. Pure functions, one per game equation.
// ---------------------------------------------------------------------------

// Initial market wealth from a uniform draw u in [0, 100): floor(B + u).
int64_t initial_wealth_value(int64_t board_lot, double u);
int64_t initial_wealth(int64_t board_lot, Rng& rng);

// Order quantity q = floor(w / B). Returns 0 when wealth < board_lot;
// live players always satisfy wealth >= board_lot when opening.
int64_t order_quantity(int64_t wealth, int64_t board_lot);

// Quinary quantization of a price change against the cognitive threshold.
// Boundaries +-C map to +-1. Rejects non-finite input.
Digit quantize_price_change(double delta_p, double cognitive_threshold);

struct ActionResolution {
    Action recommended = kHold;
    Action executed = kHold;  // the order actually placed (reverse order on close)
    enum class HoldKind : uint8_t { None, Active, Passive } hold_kind = HoldKind::None;
    bool opens = false;
    bool closes = false;
};

// Position-aware action resolution: an open recommendation repeating the
// held direction degrades to a passive hold; the opposite direction closes.
ActionResolution resolve_action(Action recommended, const Position& position);

// Round-trip settlement: strategy gain delta G = a(t0) * (P(t) - P(t0)) and
// wealth delta = delta G * quantity. Throws SimError on int64 overflow.
std::pair<int64_t, int64_t> settle_round_trip(const Position& position,
                                              int64_t cognitive_price_now);

// Review argmax: the incumbent keeps ties, otherwise the lowest index among
// the maxima wins.
int32_t select_best_strategy(std::span<const int64_t> gains, int32_t active);

// ---------------------------------------------------------------------------
// Game
// ---------------------------------------------------------------------------

struct RunOptions {
    bool collect_steps = true;
    bool collect_trades = true;
    bool collect_gain_events = false;
    bool check_invariants = false;  // per-step internal consistency checks
    std::function<void(const TradeRecord&)> on_trade;  // called for every real close
};

struct RunOutput {
    GameConfig config;
    std::vector<StepRecord> steps;
    std::vector<TradeRecord> trades;
    std::vector<GainEvent> gain_events;
    std::vector<ReplacementRecord> replacements;
    std::vector<int64_t> initial_wealth;          // per player, t = 0
    std::vector<int64_t> final_wealth;            // per player, t = T (post replacement)
    std::vector<std::vector<int64_t>> final_gains; // per player, per strategy
    std::vector<Digit> exo_digits;                // ExogenousHistory mode only, one per step
    ActionTotals action_totals;
    uint64_t n_switches = 0;
    uint64_t n_replacements = 0;
    double time_avg_total_wealth = 0.0;           // mean over steps of sum_i w_i(t)
    double final_price = 0.0;
};

// Deterministic fixture used by tests: explicit seed history and player
// tables instead of random initialization. Replacements still draw from the
// run RNG.
struct PlayerSetup {
    int64_t wealth = 0;
    std::vector<Action> tables;  // n_strategies * 5^memory entries
};
struct GameSetup {
    std::vector<Digit> history;  // exactly `memory` digits
    std::vector<PlayerSetup> players;
};

// Strategy tables are stateless: a player carries one 64-bit table seed and
// entry (j, pattern) is splitmix64(seed ^ (j * 5^M + pattern)) mod 3 mapped
// as 0 -> buy, 1 -> sell, 2 -> hold. Replacements therefore cost two RNG
// draws instead of an S * 5^M refill (the market churns through ~2 players
// per step at the paper's scale), and memory no longer grows with 5^M.
Action table_entry(uint64_t table_seed, int64_t entry_index);

// The Speculation Game state machine.
//
// RNG draw protocol (fixed; the micro oracle transcribes it independently):
//   init:  (1) M seed history digits, each below(5) - 2;
//          (2) per player i = 0..N-1: wealth floor(B + 100*uniform01()),
//              then one next_u64() as the strategy-table seed;
//          (3) ExogenousHistory mode: M seed digits for the exogenous window.
//   step:  RandomEntry mode, in player order: one uniform01() per flat player
//          (open if < p, then below(2): 0 -> buy, 1 -> sell) and one
//          uniform01() per position holder (close if < p);
//          ExogenousHistory mode: one exogenous digit below(5) - 2 appended
//          after the endogenous history update;
//          replacements, in player order: wealth then table seed as in init.
class Game {
public:
    explicit Game(const GameConfig& cfg);
    Game(const GameConfig& cfg, const GameSetup& setup);

    // Executes one tick: decide -> price -> quantize -> settle -> replace.
    StepRecord step();

    RunOutput run(const RunOptions& options = {});

    const MarketState& market() const { return market_; }
    PlayerState player(int i) const; // snapshot assembled from the flat arrays
    int64_t t() const { return market_.t; }

private:
    enum class RealOp : uint8_t { None, OpenBuy, OpenSell, Close };
    struct Scratch {
        RealOp op = RealOp::None;
        int64_t qty = 0;
    };

    void init_market();
    void draw_player(int i);
    void reset_sinks();
    void decide_random_entry(int i, StepRecord& rec);
    void settle_player(int i, uint32_t pattern, int64_t now, StepRecord& rec);
    void review_player(int i, int64_t now);
    void count_order(StepRecord& rec, Action executed, int64_t quantity);
    void check_step_invariants(const StepRecord& rec) const;

    GameConfig cfg_;
    Rng rng_;
    int64_t table_size_ = 0;
    uint32_t pow5m_ = 0;
    MarketState market_;

    // Player state as flat arrays walked sequentially by the step loops.
    std::vector<int64_t> wealth_;       // N
    std::vector<int32_t> active_;       // N
    std::vector<int32_t> pending_;      // N, -1 = none
    std::vector<Position> real_;        // N
    std::vector<int64_t> gains_;        // N * S
    std::vector<Position> virt_;        // N * S
    std::vector<uint64_t> table_seed_;  // N
    std::vector<Action> tables_;        // fixture games only: N * S * 5^M
    bool materialized_tables_ = false;
    std::vector<Scratch> scratch_;      // N

    Action lookup(size_t player, int32_t strategy, uint32_t pattern) const {
        const int64_t e = strategy * table_size_ + pattern;
        if (materialized_tables_)
            return tables_[player * static_cast<size_t>(cfg_.n_strategies) *
                               static_cast<size_t>(table_size_) +
                           static_cast<size_t>(e)];
        return table_entry(table_seed_[player], e);
    }

    // ExogenousHistory mode: the pattern stream players actually consume.
    uint32_t exo_pattern_ = 0;

    // Running aggregates.
    __int128 total_wealth_ = 0;
    __int128 wealth_time_sum_ = 0;
    int64_t cum_digit_sum_ = 0;  // invariant check: P(t) == sum of step digits

    // Sinks wired up by run(); null outside of it.
    RunOutput* out_ = nullptr;
    const RunOptions* opts_ = nullptr;
};

// Runs a full game per the config: T steps, deterministic for a fixed seed.
RunOutput run(const GameConfig& cfg, const RunOptions& options = {});

// Price series p(0..T) assembled from a run (p(0) = config.initial_price).
std::vector<double> price_series(const RunOutput& out);

// Delta p series of a run, one entry per step.
std::vector<double> delta_p_series(const RunOutput& out);

} // namespace specgame
