#include "specgame/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace specgame {

namespace {

int64_t checked_add(int64_t a, int64_t b, int64_t t, const char* what) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw SimError(std::string(what) + " overflow at step " + std::to_string(t));
    return r;
}

int64_t checked_mul(int64_t a, int64_t b, int64_t t, const char* what) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw SimError(std::string(what) + " overflow at step " + std::to_string(t));
    return r;
}

Action action_from_draw(uint64_t d) {
    switch (d) {
        case 0: return kBuy;
        case 1: return kSell;
        default: return kHold;
    }
}

} // namespace

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Standard: return "standard";
        case Mode::ExogenousHistory: return "exogenous";
        case Mode::RandomEntry: return "random-entry";
    }
    return "standard";
}

Mode mode_from_name(const std::string& name) {
    if (name == "standard") return Mode::Standard;
    if (name == "exogenous") return Mode::ExogenousHistory;
    if (name == "random-entry" || name == "random_entry") return Mode::RandomEntry;
    throw std::invalid_argument("mode: unknown value '" + name +
                                "' (expected standard, exogenous or random-entry)");
}

int64_t GameConfig::table_size() const {
    int64_t s = 1;
    for (int32_t i = 0; i < memory; ++i) s *= 5;
    return s;
}

void GameConfig::validate() const {
    if (n_players < 1) throw std::invalid_argument("n_players must be >= 1");
    if (n_strategies < 1) throw std::invalid_argument("n_strategies must be >= 1");
    if (memory < 1) throw std::invalid_argument("memory must be >= 1");
    if (memory > 12) throw std::invalid_argument("memory: 5^memory table does not fit in memory");
    if (board_lot < 1) throw std::invalid_argument("board_lot must be >= 1");
    if (!(cognitive_threshold > 0) || !std::isfinite(cognitive_threshold))
        throw std::invalid_argument("cognitive_threshold must be a positive finite real");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (!std::isfinite(initial_price)) throw std::invalid_argument("initial_price must be finite");
    if (!(random_entry_prob >= 0.0 && random_entry_prob <= 1.0))
        throw std::invalid_argument("random_entry_prob must be in [0,1]");
    const double bytes = static_cast<double>(n_players) * n_strategies *
                         static_cast<double>(table_size());
    if (bytes > 4e9)
        throw std::invalid_argument("memory: strategy tables would need " +
                                    std::to_string(bytes / 1e9) + " GB");
}

// ---------------------------------------------------------------------------
// Rule kernels
// ---------------------------------------------------------------------------

int64_t initial_wealth_value(int64_t board_lot, double u) {
    return board_lot + static_cast<int64_t>(u); // floor(B + u), B integer, u in [0,100)
}

int64_t initial_wealth(int64_t board_lot, Rng& rng) {
    return initial_wealth_value(board_lot, rng.uniform01() * 100.0);
}

int64_t order_quantity(int64_t wealth, int64_t board_lot) {
    if (wealth < 0) return 0;
    return wealth / board_lot;
}

Digit quantize_price_change(double delta_p, double cognitive_threshold) {
    if (!std::isfinite(delta_p)) throw SimError("non-finite price change");
    if (delta_p > cognitive_threshold) return 2;
    if (delta_p > 0) return 1;
    if (delta_p == 0) return 0;
    if (delta_p >= -cognitive_threshold) return -1;
    return -2;
}

OrderClass order_class(int64_t quantity) {
    if (quantity < 0) throw std::invalid_argument("order quantity must be nonnegative");
    if (quantity > 100) return OrderClass::Big;
    if (quantity > 50) return OrderClass::Medium;
    return OrderClass::Small;
}

ActionResolution resolve_action(Action recommended, const Position& position) {
    ActionResolution r;
    r.recommended = recommended;
    if (!position.open) {
        if (recommended == kHold) {
            r.hold_kind = ActionResolution::HoldKind::Active;
        } else {
            r.executed = recommended;
            r.opens = true;
        }
        return r;
    }
    if (recommended == kHold) {
        r.hold_kind = ActionResolution::HoldKind::Active;
    } else if (recommended == position.direction) {
        // Adding to a position is prohibited: forced (passive) hold.
        r.hold_kind = ActionResolution::HoldKind::Passive;
    } else {
        r.executed = static_cast<Action>(-position.direction);
        r.closes = true;
    }
    return r;
}

std::pair<int64_t, int64_t> settle_round_trip(const Position& position,
                                              int64_t cognitive_price_now) {
    // Cognitive prices are bounded by 2t, so the gain itself cannot overflow;
    // the conversion into market wealth can.
    const int64_t gain = position.direction * (cognitive_price_now - position.open_cog_price);
    const int64_t dw = checked_mul(gain, position.quantity, position.open_time, "wealth delta");
    return {gain, dw};
}

Action table_entry(uint64_t table_seed, int64_t entry_index) {
    return action_from_draw(splitmix64(table_seed ^ static_cast<uint64_t>(entry_index)) % 3);
}

int32_t select_best_strategy(std::span<const int64_t> gains, int32_t active) {
    int32_t best = active;
    int64_t best_gain = gains[static_cast<size_t>(active)];
    for (size_t j = 0; j < gains.size(); ++j) {
        if (gains[j] > best_gain) {
            best = static_cast<int32_t>(j);
            best_gain = gains[j];
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Game
// ---------------------------------------------------------------------------

Game::Game(const GameConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    table_size_ = cfg_.table_size();
    pow5m_ = static_cast<uint32_t>(table_size_);
    init_market();
    for (int32_t i = 0; i < cfg_.memory; ++i) {
        const Digit d = static_cast<Digit>(static_cast<int>(rng_.below(5)) - 2);
        market_.history.push_back(d);
        market_.pattern = (market_.pattern * 5 + static_cast<uint32_t>(d + 2)) % pow5m_;
    }
    const size_t n = static_cast<size_t>(cfg_.n_players);
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    wealth_.resize(n);
    active_.assign(n, 0);
    pending_.assign(n, -1);
    real_.assign(n, Position{});
    gains_.assign(n * s, 0);
    virt_.assign(n * s, Position{});
    table_seed_.resize(n);
    scratch_.resize(n);
    for (int i = 0; i < cfg_.n_players; ++i) draw_player(i);
    if (cfg_.mode == Mode::ExogenousHistory) {
        for (int32_t i = 0; i < cfg_.memory; ++i) {
            const Digit d = static_cast<Digit>(static_cast<int>(rng_.below(5)) - 2);
            exo_pattern_ = (exo_pattern_ * 5 + static_cast<uint32_t>(d + 2)) % pow5m_;
        }
    }
    for (int64_t w : wealth_) total_wealth_ += w;
}

Game::Game(const GameConfig& cfg, const GameSetup& setup) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    table_size_ = cfg_.table_size();
    pow5m_ = static_cast<uint32_t>(table_size_);
    if (setup.history.size() != static_cast<size_t>(cfg_.memory))
        throw std::invalid_argument("setup history must have exactly `memory` digits");
    if (setup.players.size() != static_cast<size_t>(cfg_.n_players))
        throw std::invalid_argument("setup must provide one player per n_players");
    init_market();
    for (Digit d : setup.history) {
        if (d < -2 || d > 2) throw std::invalid_argument("setup history digit out of range");
        market_.history.push_back(d);
        market_.pattern = (market_.pattern * 5 + static_cast<uint32_t>(d + 2)) % pow5m_;
    }
    const size_t n = static_cast<size_t>(cfg_.n_players);
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    const size_t per_player = s * static_cast<size_t>(table_size_);
    wealth_.resize(n);
    active_.assign(n, 0);
    pending_.assign(n, -1);
    real_.assign(n, Position{});
    gains_.assign(n * s, 0);
    virt_.assign(n * s, Position{});
    table_seed_.assign(n, 0);
    tables_.resize(n * per_player);
    materialized_tables_ = true;
    scratch_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const PlayerSetup& ps = setup.players[i];
        if (ps.tables.size() != per_player)
            throw std::invalid_argument("setup tables must have n_strategies * 5^memory entries");
        wealth_[i] = ps.wealth;
        std::copy(ps.tables.begin(), ps.tables.end(), tables_.begin() + i * per_player);
        total_wealth_ += ps.wealth;
    }
}

void Game::init_market() {
    market_.t = 0;
    market_.price = cfg_.initial_price;
    market_.cognitive_price = 0;
    market_.last_delta = 0.0;
    market_.history.reserve(static_cast<size_t>(cfg_.memory + cfg_.n_steps));
}

void Game::draw_player(int i) {
    const size_t n = static_cast<size_t>(i);
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    wealth_[n] = initial_wealth(cfg_.board_lot, rng_);
    table_seed_[n] = rng_.next_u64();
    if (materialized_tables_) {
        // Fixture games keep explicit tables; a substitute refills its slice
        // from the hashed entries so both representations stay equivalent.
        const size_t n_entries = s * static_cast<size_t>(table_size_);
        Action* table = tables_.data() + n * n_entries;
        for (size_t e = 0; e < n_entries; ++e)
            table[e] = table_entry(table_seed_[n], static_cast<int64_t>(e));
    }
    active_[n] = 0;
    pending_[n] = -1;
    real_[n] = Position{};
    for (size_t j = 0; j < s; ++j) {
        gains_[n * s + j] = 0;
        virt_[n * s + j] = Position{};
    }
}

PlayerState Game::player(int i) const {
    const size_t n = static_cast<size_t>(i);
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    const size_t per_player = s * static_cast<size_t>(table_size_);
    PlayerState p;
    p.wealth = wealth_[n];
    p.active = active_[n];
    p.pending = pending_[n];
    p.real = real_[n];
    p.gains.assign(gains_.begin() + n * s, gains_.begin() + (n + 1) * s);
    p.virt.assign(virt_.begin() + n * s, virt_.begin() + (n + 1) * s);
    p.tables.resize(per_player);
    if (materialized_tables_) {
        std::copy(tables_.begin() + n * per_player, tables_.begin() + (n + 1) * per_player,
                  p.tables.begin());
    } else {
        for (size_t e = 0; e < per_player; ++e)
            p.tables[e] = table_entry(table_seed_[n], static_cast<int64_t>(e));
    }
    return p;
}

void Game::count_order(StepRecord& rec, Action executed, int64_t quantity) {
    if (executed == kBuy) ++rec.buys; else ++rec.sells;
    switch (order_class(quantity)) {
        case OrderClass::Big: ++rec.big_orders; break;
        case OrderClass::Medium: ++rec.medium_orders; break;
        case OrderClass::Small: ++rec.small_orders; break;
    }
}

void Game::decide_random_entry(int i, StepRecord& rec) {
    const size_t n = static_cast<size_t>(i);
    Scratch& sc = scratch_[n];
    if (!real_[n].open) {
        if (rng_.uniform01() < cfg_.random_entry_prob) {
            sc.op = rng_.below(2) == 0 ? RealOp::OpenBuy : RealOp::OpenSell;
            sc.qty = order_quantity(wealth_[n], cfg_.board_lot);
        } else {
            ++rec.active_hold;
        }
    } else {
        if (rng_.uniform01() < cfg_.random_entry_prob) sc.op = RealOp::Close;
        else ++rec.passive_hold;
    }
}

void Game::review_player(int i, int64_t now) {
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    const int64_t* gains = gains_.data() + static_cast<size_t>(i) * s;
    const int32_t best =
        select_best_strategy({gains, s}, active_[static_cast<size_t>(i)]);
    if (best == active_[static_cast<size_t>(i)]) return;
    Position& vp = virt_[static_cast<size_t>(i) * s + static_cast<size_t>(best)];
    if (vp.open) {
        // Aborted forthwith: the ongoing virtual trade of the new best
        // strategy settles at the current cognitive price.
        const int64_t gain = settle_round_trip(vp, market_.cognitive_price).first;
        gains_[static_cast<size_t>(i) * s + static_cast<size_t>(best)] =
            checked_add(gains[best], gain, now, "accumulated gain");
        if (opts_ && opts_->collect_gain_events)
            out_->gain_events.push_back(
                {i, best, vp.open_time, now, gain, GainEvent::Kind::VirtualAborted});
        vp.open = false;
    }
    pending_[static_cast<size_t>(i)] = best;
    if (out_) ++out_->n_switches;
}

void Game::settle_player(int i, uint32_t pattern, int64_t now, StepRecord& rec) {
    const size_t n = static_cast<size_t>(i);
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    const int64_t P = market_.cognitive_price;

    // Virtual round trips of the unused strategies, settled before the real
    // close so the review sees every gain realized through this step.
    if (cfg_.mode != Mode::RandomEntry && cfg_.n_strategies > 1) {
        const int32_t active = active_[n];
        for (int32_t j = 0; j < cfg_.n_strategies; ++j) {
            if (j == active) continue;
            const Action a = lookup(n, j, pattern);
            Position& vp = virt_[n * s + static_cast<size_t>(j)];
            if (!vp.open) {
                if (a != kHold) vp = Position{a, now, 0, P, true};
            } else if (a != kHold && a != vp.direction) {
                const int64_t gain = settle_round_trip(vp, P).first;
                gains_[n * s + static_cast<size_t>(j)] =
                    checked_add(gains_[n * s + static_cast<size_t>(j)], gain, now,
                                "accumulated gain");
                if (opts_ && opts_->collect_gain_events)
                    out_->gain_events.push_back(
                        {i, j, vp.open_time, now, gain, GainEvent::Kind::Virtual});
                vp.open = false;
            }
        }
    }

    const Scratch sc = scratch_[n];
    if (sc.op == RealOp::OpenBuy || sc.op == RealOp::OpenSell) {
        real_[n] = Position{sc.op == RealOp::OpenBuy ? kBuy : kSell, now, sc.qty, P, true};
    } else if (sc.op == RealOp::Close) {
        const auto [gain, dw] = settle_round_trip(real_[n], P);
        wealth_[n] = checked_add(wealth_[n], dw, now, "wealth");
        const size_t slot = n * s + static_cast<size_t>(active_[n]);
        gains_[slot] = checked_add(gains_[slot], gain, now, "accumulated gain");
        total_wealth_ += dw;
        const bool bankrupt = wealth_[n] < cfg_.board_lot;
        if (out_) {
            if (opts_->collect_trades || opts_->on_trade) {
                TradeRecord tr{i, real_[n].direction, real_[n].open_time, now,
                               real_[n].quantity, gain, dw, bankrupt};
                if (opts_->collect_trades) out_->trades.push_back(tr);
                if (opts_->on_trade) opts_->on_trade(tr);
            }
            if (opts_->collect_gain_events)
                out_->gain_events.push_back({i, active_[n], real_[n].open_time, now, gain,
                                             GainEvent::Kind::Real});
        }
        real_[n].open = false;
        if (cfg_.mode != Mode::RandomEntry && cfg_.n_strategies > 1) review_player(i, now);
    }
}

StepRecord Game::step() {
    const int64_t now = market_.t + 1;
    StepRecord rec;
    rec.t = now;

    const uint32_t pattern =
        cfg_.mode == Mode::ExogenousHistory ? exo_pattern_ : market_.pattern;
    const int N = cfg_.n_players;

    // Phase 1+2: apply pending switches, resolve real actions, form the
    // order imbalance. Quantities use wealth as of the step start.
    __int128 order_sum = 0;
    for (int i = 0; i < N; ++i) {
        const size_t n = static_cast<size_t>(i);
        if (pending_[n] >= 0) {
            active_[n] = pending_[n];
            pending_[n] = -1;
        }
        Scratch& sc = scratch_[n];
        sc = Scratch{};
        if (cfg_.mode == Mode::RandomEntry) {
            decide_random_entry(i, rec);
        } else {
            const Action a = lookup(n, active_[n], pattern);
            const Position& pos = real_[n];
            if (!pos.open) {
                if (a == kHold) ++rec.active_hold;
                else {
                    sc.op = a == kBuy ? RealOp::OpenBuy : RealOp::OpenSell;
                    sc.qty = wealth_[n] / cfg_.board_lot;
                }
            } else {
                if (a == kHold) ++rec.active_hold;
                else if (a == pos.direction) ++rec.passive_hold;
                else sc.op = RealOp::Close;
            }
        }
        if (sc.op == RealOp::OpenBuy) {
            order_sum += sc.qty;
            count_order(rec, kBuy, sc.qty);
        } else if (sc.op == RealOp::OpenSell) {
            order_sum -= sc.qty;
            count_order(rec, kSell, sc.qty);
        } else if (sc.op == RealOp::Close) {
            const Action exec = static_cast<Action>(-real_[n].direction);
            order_sum += static_cast<__int128>(exec) * real_[n].quantity;
            count_order(rec, exec, real_[n].quantity);
        }
    }

    // Phase 3: price formation and history quantization.
    const double delta_p = static_cast<double>(order_sum) / N;
    const double new_price = market_.price + delta_p;
    if (!std::isfinite(new_price))
        throw SimError("non-finite price at step " + std::to_string(now));
    const Digit h = quantize_price_change(delta_p, cfg_.cognitive_threshold);
    market_.history.push_back(h);
    market_.pattern = (market_.pattern * 5 + static_cast<uint32_t>(h + 2)) % pow5m_;
    market_.cognitive_price += h;
    cum_digit_sum_ += h;
    market_.price = new_price;
    market_.last_delta = delta_p;
    market_.t = now;
    rec.delta_p = delta_p;
    rec.price = new_price;
    rec.h = h;
    if (cfg_.mode == Mode::ExogenousHistory) {
        const Digit d = static_cast<Digit>(static_cast<int>(rng_.below(5)) - 2);
        exo_pattern_ = (exo_pattern_ * 5 + static_cast<uint32_t>(d + 2)) % pow5m_;
        if (out_) out_->exo_digits.push_back(d);
    }

    // Phase 4: settlements at the post-update cognitive price, then reviews.
    for (int i = 0; i < N; ++i) settle_player(i, pattern, now, rec);

    // Phase 5: bankrupt players leave; substitutes first act at t + 1.
    for (int i = 0; i < N; ++i) {
        const size_t n = static_cast<size_t>(i);
        if (wealth_[n] >= cfg_.board_lot) continue;
        total_wealth_ -= wealth_[n];
        draw_player(i);
        total_wealth_ += wealth_[n];
        ++rec.n_replacements;
        if (out_) {
            out_->replacements.push_back({now, i, wealth_[n]});
            ++out_->n_replacements;
        }
    }

    wealth_time_sum_ += total_wealth_;

    if (opts_ && opts_->check_invariants) check_step_invariants(rec);
    return rec;
}

void Game::check_step_invariants(const StepRecord& rec) const {
    const int64_t acts = static_cast<int64_t>(rec.active_hold) + rec.passive_hold +
                         rec.buys + rec.sells;
    if (acts != cfg_.n_players)
        throw SimError("action counts do not sum to N at step " + std::to_string(rec.t));
    const int64_t orders = static_cast<int64_t>(rec.big_orders) + rec.medium_orders +
                           rec.small_orders;
    if (orders != rec.buys + rec.sells)
        throw SimError("order class counts do not match submitted orders at step " +
                       std::to_string(rec.t));
    if (market_.cognitive_price != cum_digit_sum_)
        throw SimError("cognitive price diverged from digit sum at step " +
                       std::to_string(rec.t));
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    for (size_t n = 0; n < wealth_.size(); ++n) {
        if (wealth_[n] < cfg_.board_lot)
            throw SimError("live player below board lot at step " + std::to_string(rec.t));
        if (virt_[n * s + static_cast<size_t>(active_[n])].open)
            throw SimError("active strategy holds a virtual position at step " +
                           std::to_string(rec.t));
        if (real_[n].open && real_[n].quantity < 1)
            throw SimError("open real position with zero quantity at step " +
                           std::to_string(rec.t));
    }
}

void Game::reset_sinks() {
    out_ = nullptr;
    opts_ = nullptr;
}

RunOutput Game::run(const RunOptions& options) {
    RunOutput out;
    out.config = cfg_;
    out_ = &out;
    opts_ = &options;
    out.initial_wealth = wealth_;
    if (options.collect_steps) out.steps.reserve(static_cast<size_t>(cfg_.n_steps));
    try {
        for (int64_t s = 0; s < cfg_.n_steps; ++s) {
            StepRecord rec = step();
            out.action_totals.active_hold += static_cast<uint64_t>(rec.active_hold);
            out.action_totals.passive_hold += static_cast<uint64_t>(rec.passive_hold);
            out.action_totals.buys += static_cast<uint64_t>(rec.buys);
            out.action_totals.sells += static_cast<uint64_t>(rec.sells);
            if (options.collect_steps) out.steps.push_back(rec);
        }
    } catch (...) {
        reset_sinks();
        throw;
    }
    reset_sinks();
    out.final_wealth = wealth_;
    const size_t s = static_cast<size_t>(cfg_.n_strategies);
    out.final_gains.reserve(wealth_.size());
    for (size_t n = 0; n < wealth_.size(); ++n)
        out.final_gains.emplace_back(gains_.begin() + n * s, gains_.begin() + (n + 1) * s);
    out.time_avg_total_wealth =
        static_cast<double>(wealth_time_sum_) / static_cast<double>(cfg_.n_steps);
    out.final_price = market_.price;
    return out;
}

RunOutput run(const GameConfig& cfg, const RunOptions& options) {
    Game game(cfg);
    return game.run(options);
}

std::vector<double> price_series(const RunOutput& out) {
    std::vector<double> p;
    p.reserve(out.steps.size() + 1);
    p.push_back(out.config.initial_price);
    for (const auto& s : out.steps) p.push_back(s.price);
    return p;
}

std::vector<double> delta_p_series(const RunOutput& out) {
    std::vector<double> d;
    d.reserve(out.steps.size());
    for (const auto& s : out.steps) d.push_back(s.delta_p);
    return d;
}

} // namespace specgame
