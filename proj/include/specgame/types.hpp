#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace specgame {

// Trading actions are encoded directly as their order sign: buy = +1,
// sell = -1, hold = 0. Quantized price moves ("digits") live in {-2..2}.
using Action = int8_t;
inline constexpr Action kBuy = 1;
inline constexpr Action kSell = -1;
inline constexpr Action kHold = 0;

using Digit = int8_t;

enum class Mode { Standard, ExogenousHistory, RandomEntry };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name); // throws std::invalid_argument

// Order-size classes. Thresholds: big q > 100, medium 50 < q <= 100,
// small q <= 50. Negative quantities are rejected.
enum class OrderClass { Big, Medium, Small };
OrderClass order_class(int64_t quantity);

// Raised when a run becomes numerically unusable (non-finite price,
// integer wealth overflow). Carries the step index in the message.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GameConfig {
    int32_t n_players = 1000;        // N
    int32_t n_strategies = 2;        // S
    int32_t memory = 5;              // M
    int64_t board_lot = 9;           // B
    double cognitive_threshold = 3.0; // C
    int64_t n_steps = 50'000;        // T
    double initial_price = 100.0;    // p(0)
    uint64_t seed = 1;
    Mode mode = Mode::Standard;
    double random_entry_prob = 0.5;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    int64_t table_size() const; // 5^memory
};

struct Position {
    Action direction = kHold;     // kBuy or kSell while open
    int64_t open_time = 0;        // t0
    int64_t quantity = 0;         // 0 for virtual positions
    int64_t open_cog_price = 0;   // P(t0), post-update value of the opening step
    bool open = false;
};

struct PlayerState {
    int64_t wealth = 0;
    int32_t active = 0;           // j* index into tables/gains
    int32_t pending = -1;         // strategy adopted at the next step, -1 = none
    Position real;
    std::vector<int64_t> gains;   // accumulated strategy gain G, one per strategy
    std::vector<Position> virt;   // one slot per strategy; virt[active] is never open
    std::vector<Action> tables;   // n_strategies * 5^memory entries, flattened
};

struct MarketState {
    int64_t t = 0;
    double price = 0.0;           // p(t)
    int64_t cognitive_price = 0;  // P(t)
    double last_delta = 0.0;      // last delta p
    std::vector<Digit> history;   // seed digits followed by one digit per step
    uint32_t pattern = 0;         // packed base-5 index of the last M digits
};

struct TradeRecord {
    int32_t player_id = 0;
    Action direction = kHold;     // opening direction
    int64_t open_time = 0;
    int64_t close_time = 0;
    int64_t quantity = 0;
    int64_t strategy_gain = 0;    // delta G
    int64_t wealth_delta = 0;     // delta w = delta G * quantity
    bool caused_bankruptcy = false;
};

struct StepRecord {
    int64_t t = 0;
    double delta_p = 0.0;
    double price = 0.0;
    Digit h = 0;
    int32_t active_hold = 0;
    int32_t passive_hold = 0;
    int32_t buys = 0;
    int32_t sells = 0;
    int32_t big_orders = 0;       // q > 100
    int32_t medium_orders = 0;    // 50 < q <= 100
    int32_t small_orders = 0;     // q <= 50
    int32_t n_replacements = 0;
};

// One Eq. 6/7 gain accrual. Real closes, virtual closes and review-time
// aborts all emit one; together with ReplacementRecord they make the final
// accumulated gains replayable from the log.
struct GainEvent {
    enum class Kind : uint8_t { Real, Virtual, VirtualAborted };
    int32_t player_id = 0;
    int32_t strategy = 0;
    int64_t open_time = 0;
    int64_t close_time = 0;
    int64_t gain = 0;
    Kind kind = Kind::Virtual;
};

struct ReplacementRecord {
    int64_t t = 0;
    int32_t player_id = 0;
    int64_t new_wealth = 0;
};

struct ActionTotals {
    uint64_t active_hold = 0;
    uint64_t passive_hold = 0;
    uint64_t buys = 0;
    uint64_t sells = 0;
};

} // namespace specgame
