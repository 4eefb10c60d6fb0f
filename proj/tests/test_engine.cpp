#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "specgame/engine.hpp"
#include "specgame/rng.hpp"

using namespace specgame;

TEST_SUITE("engine") {

TEST_CASE("initial wealth floors the uniform draw onto the board lot") {
    CHECK(initial_wealth_value(9, 0.0) == 9);
    CHECK(initial_wealth_value(9, 99.999) == 108);
    CHECK(initial_wealth_value(2, 47.3) == 49);

    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
        const int64_t w = initial_wealth(9, rng);
        CHECK(w >= 9);
        CHECK(w <= 108);
        CHECK(order_quantity(w, 9) >= 1); // one unit order at least
    }
}

TEST_CASE("order quantity is floor(w / B)") {
    CHECK(order_quantity(27, 9) == 3);
    CHECK(order_quantity(8, 9) == 0);
    CHECK(order_quantity(137, 9) == 15);
}

TEST_CASE("price-change quantization, boundaries inclusive at +-C") {
    CHECK(quantize_price_change(3.5, 3.0) == 2);
    CHECK(quantize_price_change(0.0, 3.0) == 0);
    CHECK(quantize_price_change(-3.0, 3.0) == -1);
    CHECK(quantize_price_change(3.0, 3.0) == 1);
    CHECK(quantize_price_change(-3.0001, 3.0) == -2);
    CHECK(quantize_price_change(1e-300, 3.0) == 1);
    CHECK_THROWS_AS((void)quantize_price_change(std::nan(""), 3.0), SimError);
    CHECK_THROWS_AS((void)quantize_price_change(INFINITY, 3.0), SimError);
}

TEST_CASE("order classes partition the nonnegative integers") {
    CHECK(order_class(101) == OrderClass::Big);
    CHECK(order_class(100) == OrderClass::Medium);
    CHECK(order_class(51) == OrderClass::Medium);
    CHECK(order_class(50) == OrderClass::Small);
    CHECK(order_class(0) == OrderClass::Small);
    CHECK_THROWS_AS((void)order_class(-1), std::invalid_argument);
}

TEST_CASE("action resolution against the current position") {
    Position flat;
    Position long_pos{kBuy, 3, 5, 1, true};

    auto r = resolve_action(kBuy, flat);
    CHECK(r.opens);
    CHECK(r.executed == kBuy);

    r = resolve_action(kHold, flat);
    CHECK(r.hold_kind == ActionResolution::HoldKind::Active);
    CHECK(!r.opens);

    r = resolve_action(kBuy, long_pos); // repeat of the opening order
    CHECK(r.hold_kind == ActionResolution::HoldKind::Passive);
    CHECK(r.executed == kHold);

    r = resolve_action(kHold, long_pos);
    CHECK(r.hold_kind == ActionResolution::HoldKind::Active);

    r = resolve_action(kSell, long_pos);
    CHECK(r.closes);
    CHECK(r.executed == kSell);

    Position short_pos{kSell, 3, 5, 1, true};
    r = resolve_action(kBuy, short_pos);
    CHECK(r.closes);
    CHECK(r.executed == kBuy);
}

TEST_CASE("round-trip settlement follows the gain and adjustment rules") {
    CHECK(settle_round_trip(Position{kBuy, 0, 2, 0, true}, 3) == std::pair<int64_t, int64_t>{3, 6});
    CHECK(settle_round_trip(Position{kSell, 0, 4, 5, true}, 2) ==
          std::pair<int64_t, int64_t>{3, 12});
    CHECK(settle_round_trip(Position{kBuy, 0, 7, 1, true}, 1) == std::pair<int64_t, int64_t>{0, 0});
}

TEST_CASE("strategy review keeps the incumbent on ties") {
    CHECK(select_best_strategy(std::vector<int64_t>{5, 2}, 0) == 0);
    CHECK(select_best_strategy(std::vector<int64_t>{2, 5}, 0) == 1);
    CHECK(select_best_strategy(std::vector<int64_t>{7, 7}, 1) == 1);  // incumbent among maxima
    CHECK(select_best_strategy(std::vector<int64_t>{7, 5, 7}, 1) == 0); // lowest index wins
    CHECK(select_best_strategy(std::vector<int64_t>{-3}, 0) == 0);
}

TEST_CASE("config validation names the offending field") {
    GameConfig cfg;
    cfg.n_steps = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_steps"), std::invalid_argument);
    cfg = GameConfig{};
    cfg.n_players = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_players"), std::invalid_argument);
    cfg = GameConfig{};
    cfg.cognitive_threshold = -1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("cognitive_threshold"),
                         std::invalid_argument);
    cfg = GameConfig{};
    cfg.memory = 13;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)mode_from_name("bogus"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Deterministic fixtures
// ---------------------------------------------------------------------------

namespace {

std::vector<Action> uniform_table(size_t entries, Action a) {
    return std::vector<Action>(entries, a);
}

GameConfig micro_config(int n_players, int strategies = 1) {
    GameConfig cfg;
    cfg.n_players = n_players;
    cfg.n_strategies = strategies;
    cfg.memory = 1;
    cfg.board_lot = 9;
    cfg.cognitive_threshold = 3.0;
    cfg.n_steps = 10;
    cfg.seed = 7;
    return cfg;
}

} // namespace

TEST_CASE("single idle player leaves the market unchanged") {
    GameConfig cfg = micro_config(1);
    GameSetup setup;
    setup.history = {0};
    setup.players.push_back({50, uniform_table(5, kHold)});
    Game game(cfg, setup);
    const StepRecord rec = game.step();
    CHECK(rec.delta_p == 0.0);
    CHECK(rec.h == 0);
    CHECK(rec.active_hold == 1);
    CHECK(game.market().cognitive_price == 0);
    CHECK(game.market().price == cfg.initial_price);
}

TEST_CASE("two buyers move the price by the order imbalance") {
    GameConfig cfg = micro_config(2);
    GameSetup setup;
    setup.history = {0};
    setup.players.push_back({27, uniform_table(5, kBuy)}); // q = 3
    setup.players.push_back({27, uniform_table(5, kBuy)});
    Game game(cfg, setup);
    const StepRecord rec = game.step();
    CHECK(rec.delta_p == doctest::Approx(3.0));
    CHECK(rec.h == 1); // delta p == C maps to 1
    CHECK(rec.buys == 2);
    CHECK(rec.small_orders == 2);
}

TEST_CASE("order size classes split at 50 and 100") {
    GameConfig cfg = micro_config(2);
    GameSetup setup;
    setup.history = {0};
    setup.players.push_back({909, uniform_table(5, kBuy)}); // q = 101: big
    setup.players.push_back({9, uniform_table(5, kSell)});  // q = 1: small
    Game game(cfg, setup);
    const StepRecord rec = game.step();
    CHECK(rec.delta_p == doctest::Approx(50.0));
    CHECK(rec.big_orders == 1);
    CHECK(rec.small_orders == 1);
    CHECK(rec.h == 2);
}

TEST_CASE("hand-traced round trip: open, close, bankruptcy replacement") {
    // M = 1, one player, B = 9, wealth 10 (q = 1). Table: buy after down or
    // stay digits, sell after up digits. The player cycles open/close, loses
    // one unit per trip and goes bankrupt on the second close.
    GameConfig cfg = micro_config(1);
    cfg.n_steps = 4;
    GameSetup setup;
    setup.history = {0};
    setup.players.push_back({10, {kBuy, kBuy, kBuy, kSell, kSell}});
    Game game(cfg, setup);

    RunOptions opts;
    opts.check_invariants = true;
    const RunOutput out = game.run(opts);

    // t1: open buy q=1, dp=+1, h=1, P=1. t2: close (sell), dp=-1, h=-1, P=0,
    // gain = -1, wealth 9. t3: open again. t4: close, wealth 8 < B: replaced.
    REQUIRE(out.steps.size() == 4);
    CHECK(out.steps[0].buys == 1);
    CHECK(out.steps[0].h == 1);
    CHECK(out.steps[1].sells == 1);
    CHECK(out.steps[1].h == -1);
    CHECK(out.steps[3].n_replacements == 1);

    REQUIRE(out.trades.size() == 2);
    CHECK(out.trades[0].open_time == 1);
    CHECK(out.trades[0].close_time == 2);
    CHECK(out.trades[0].strategy_gain == -1);
    CHECK(out.trades[0].wealth_delta == -1);
    CHECK(!out.trades[0].caused_bankruptcy);
    CHECK(out.trades[1].close_time == 4);
    CHECK(out.trades[1].caused_bankruptcy);

    REQUIRE(out.replacements.size() == 1);
    CHECK(out.replacements[0].t == 4);
    CHECK(out.replacements[0].new_wealth >= 9);
    CHECK(out.replacements[0].new_wealth <= 108);
}

TEST_CASE("review aborts the winner's virtual trade and switches next step") {
    // Strategy 0 opens a real buy at t1 and closes at t2 with gain -1;
    // strategy 1 opened a virtual buy at t1 that is still open at review
    // time. The review picks strategy 1 (0 > -1), aborts its virtual trade
    // at the current cognitive price and switches at t3.
    GameConfig cfg = micro_config(1, 2);
    cfg.n_steps = 3;
    GameSetup setup;
    setup.history = {0};
    std::vector<Action> tables{
        kHold, kHold, kBuy, kSell, kHold,  // strategy 0, by digit -2..2
        kHold, kHold, kBuy, kBuy, kHold,   // strategy 1
    };
    setup.players.push_back({18, tables});
    Game game(cfg, setup);

    game.step(); // t1: real buy q=2 (dp=2, h=1, P=1); virtual buy for s1
    PlayerState pl = game.player(0);
    CHECK(pl.real.open);
    CHECK(pl.virt[1].open);
    CHECK(pl.virt[1].open_cog_price == 1);

    game.step(); // t2: close (dp=-2, h=-1, P=0); review -> abort + pending
    pl = game.player(0);
    CHECK(!pl.real.open);
    CHECK(!pl.virt[1].open);
    CHECK(pl.gains == std::vector<int64_t>{-1, -1}); // abort settled 0 - 1
    CHECK(pl.pending == 1);
    CHECK(pl.wealth == 16);

    game.step(); // t3: switch takes effect
    pl = game.player(0);
    CHECK(pl.active == 1);
    CHECK(pl.pending == -1);
}

// ---------------------------------------------------------------------------
// Run-level properties
// ---------------------------------------------------------------------------

namespace {

struct Replay {
    std::vector<int64_t> wealth;
    std::vector<std::vector<int64_t>> gains;
};

// Replays the gain/wealth accounting from the logs: trades and gain events
// apply in close-time order, replacements reset the slot.
Replay replay_logs(const RunOutput& out) {
    const size_t n = out.initial_wealth.size();
    const size_t s = static_cast<size_t>(out.config.n_strategies);
    Replay rp;
    rp.wealth = out.initial_wealth;
    rp.gains.assign(n, std::vector<int64_t>(s, 0));

    size_t ti = 0, gi = 0, ri = 0;
    for (int64_t t = 1; t <= out.config.n_steps; ++t) {
        while (ti < out.trades.size() && out.trades[ti].close_time == t) {
            const TradeRecord& tr = out.trades[ti];
            rp.wealth[static_cast<size_t>(tr.player_id)] += tr.wealth_delta;
            ++ti;
        }
        while (gi < out.gain_events.size() && out.gain_events[gi].close_time == t) {
            const GainEvent& ge = out.gain_events[gi];
            rp.gains[static_cast<size_t>(ge.player_id)][static_cast<size_t>(ge.strategy)] +=
                ge.gain;
            ++gi;
        }
        while (ri < out.replacements.size() && out.replacements[ri].t == t) {
            const ReplacementRecord& rr = out.replacements[ri];
            rp.wealth[static_cast<size_t>(rr.player_id)] = rr.new_wealth;
            rp.gains[static_cast<size_t>(rr.player_id)].assign(s, 0);
            ++ri;
        }
    }
    return rp;
}

void check_run_invariants(const GameConfig& cfg) {
    RunOptions opts;
    opts.check_invariants = true;
    opts.collect_gain_events = true;
    const RunOutput out = run(cfg, opts);

    // Price and cognitive-price consistency.
    double price = cfg.initial_price;
    int64_t cog = 0;
    for (const auto& s : out.steps) {
        price += s.delta_p;
        cog += s.h;
        CHECK(s.price == doctest::Approx(price).epsilon(1e-12));
        CHECK(s.active_hold + s.passive_hold + s.buys + s.sells == cfg.n_players);
        CHECK(s.big_orders + s.medium_orders + s.small_orders == s.buys + s.sells);
    }
    CHECK(out.final_price == doctest::Approx(price).epsilon(1e-12));

    // Trade integrity.
    for (const auto& tr : out.trades) {
        CHECK(tr.close_time > tr.open_time);
        CHECK(tr.quantity >= 1);
        CHECK(tr.wealth_delta == tr.strategy_gain * tr.quantity);
    }

    // Wealth changes only at closes; gains replay from the event log.
    const Replay rp = replay_logs(out);
    CHECK(rp.wealth == out.final_wealth);
    CHECK(rp.gains == out.final_gains);

    if (cfg.n_strategies == 1) CHECK(out.n_switches == 0);
}

} // namespace

TEST_CASE("run invariants hold across configurations and modes") {
    std::vector<GameConfig> configs;
    for (uint64_t seed : {1ULL, 17ULL, 923ULL}) {
        GameConfig cfg;
        cfg.n_players = 30;
        cfg.n_strategies = 2;
        cfg.memory = 3;
        cfg.board_lot = 9;
        cfg.n_steps = 500;
        cfg.seed = seed;
        configs.push_back(cfg);

        cfg.n_strategies = 1;
        cfg.seed = seed + 1;
        configs.push_back(cfg);

        cfg.n_strategies = 4;
        cfg.memory = 1;
        cfg.board_lot = 2;
        cfg.n_players = 11;
        cfg.seed = seed + 2;
        configs.push_back(cfg);

        cfg.mode = Mode::ExogenousHistory;
        cfg.seed = seed + 3;
        configs.push_back(cfg);

        cfg.mode = Mode::RandomEntry;
        cfg.seed = seed + 4;
        configs.push_back(cfg);
    }
    for (const auto& cfg : configs) {
        CAPTURE(cfg.seed);
        CAPTURE(static_cast<int>(cfg.mode));
        check_run_invariants(cfg);
    }
}

TEST_CASE("identical config and seed give identical record streams") {
    GameConfig cfg;
    cfg.n_players = 50;
    cfg.n_steps = 300;
    cfg.memory = 3;
    cfg.seed = 42;
    RunOptions opts;
    opts.collect_gain_events = true;
    const RunOutput a = run(cfg, opts);
    const RunOutput b = run(cfg, opts);
    REQUIRE(a.steps.size() == b.steps.size());
    for (size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].delta_p == b.steps[i].delta_p);
        CHECK(a.steps[i].price == b.steps[i].price);
    }
    CHECK(a.trades.size() == b.trades.size());
    CHECK(a.final_wealth == b.final_wealth);
    CHECK(a.final_gains == b.final_gains);
    CHECK(a.n_switches == b.n_switches);
}

TEST_CASE("exogenous digits are uniform and decoupled from the endogenous history") {
    GameConfig cfg;
    cfg.mode = Mode::ExogenousHistory;
    cfg.n_players = 50;
    cfg.memory = 3;
    cfg.n_steps = 5000;
    cfg.seed = 5;
    const RunOutput out = run(cfg);
    REQUIRE(out.exo_digits.size() == static_cast<size_t>(cfg.n_steps));

    std::map<int, int> counts;
    for (Digit d : out.exo_digits) ++counts[d];
    for (int d = -2; d <= 2; ++d) {
        // Uniform quinary: expectation 1000 per digit.
        CHECK(counts[d] > 800);
        CHECK(counts[d] < 1200);
    }

    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    const double n = static_cast<double>(out.steps.size());
    for (size_t i = 0; i < out.steps.size(); ++i) {
        const double x = out.exo_digits[i];
        const double y = out.steps[i].h;
        sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
    }
    const double corr = (n * sxy - sx * sy) /
                        std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(std::fabs(corr) < 0.05);
}

TEST_CASE("random-entry mode never reads the strategy tables") {
    GameConfig cfg = micro_config(3);
    cfg.mode = Mode::RandomEntry;
    cfg.n_steps = 200;
    cfg.n_strategies = 1;
    GameSetup a, b;
    a.history = b.history = {0};
    for (int i = 0; i < 3; ++i) {
        a.players.push_back({40, uniform_table(5, kBuy)});
        b.players.push_back({40, uniform_table(5, kSell)}); // tables differ
    }
    Game ga(cfg, a), gb(cfg, b);
    const RunOutput ra = ga.run();
    const RunOutput rb = gb.run();
    REQUIRE(ra.steps.size() == rb.steps.size());
    for (size_t i = 0; i < ra.steps.size(); ++i) {
        CHECK(ra.steps[i].delta_p == rb.steps[i].delta_p);
        CHECK(ra.steps[i].buys == rb.steps[i].buys);
    }
    CHECK(ra.n_switches == 0);
    CHECK(rb.n_switches == 0);
}

TEST_CASE("wealth overflow surfaces as a diagnostic run error") {
    GameConfig cfg = micro_config(1);
    cfg.board_lot = 1;
    cfg.n_steps = 4;
    GameSetup setup;
    setup.history = {0};
    // Open at t1 (buy on digit 0), close at t2 (sell on digit 2): the wealth
    // delta is -2 * 4.6e18 and cannot be represented.
    setup.players.push_back({4'600'000'000'000'000'000LL, {kHold, kHold, kBuy, kHold, kSell}});
    Game game(cfg, setup);
    CHECK_THROWS_AS(game.run(), SimError);
}

TEST_CASE("table entries are uniform over the three actions") {
    std::map<Action, int> counts;
    Rng rng(99);
    for (int p = 0; p < 100; ++p) {
        const uint64_t seed = rng.next_u64();
        for (int64_t e = 0; e < 243; ++e) ++counts[table_entry(seed, e)];
    }
    const int total = 100 * 243;
    for (Action a : {kBuy, kSell, kHold}) {
        CHECK(counts[a] > total / 3 - 500);
        CHECK(counts[a] < total / 3 + 500);
    }
}

} // TEST_SUITE
