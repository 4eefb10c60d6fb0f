#include <doctest.h>

#include <cmath>

#include "specgame/experiments.hpp"
#include "specgame/rng.hpp"

using namespace specgame;

namespace {

GameConfig small_config() {
    GameConfig cfg;
    cfg.n_players = 30;
    cfg.n_strategies = 2;
    cfg.memory = 3;
    cfg.board_lot = 9;
    cfg.n_steps = 400;
    return cfg;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("a single trial reproduces a single run bit-exactly") {
    const GameConfig cfg = small_config();
    const TrialSet set = run_trials(cfg, 1, 99);
    REQUIRE(set.runs.size() == 1);
    CHECK(set.errors[0].empty());

    GameConfig direct = cfg;
    direct.seed = mix_seed(99, 0);
    const RunOutput expected = run(direct);
    CHECK(set.runs[0].final_wealth == expected.final_wealth);
    CHECK(set.runs[0].steps.size() == expected.steps.size());
    for (size_t i = 0; i < expected.steps.size(); ++i)
        CHECK(set.runs[0].steps[i].delta_p == expected.steps[i].delta_p);
    CHECK(set.pooled_final_wealth == expected.final_wealth);
}

TEST_CASE("different trial indices get different seeds and series") {
    const TrialSet set = run_trials(small_config(), 2, 7);
    CHECK(set.seeds[0] != set.seeds[1]);
    bool differs = false;
    for (size_t i = 0; i < set.runs[0].steps.size() && !differs; ++i)
        differs = set.runs[0].steps[i].delta_p != set.runs[1].steps[i].delta_p;
    CHECK(differs);
}

TEST_CASE("trial results are independent of the worker count") {
    const GameConfig cfg = small_config();
    const TrialSet a = run_trials(cfg, 6, 13, 1);
    const TrialSet b = run_trials(cfg, 6, 13, 4);
    REQUIRE(a.runs.size() == b.runs.size());
    for (size_t k = 0; k < a.runs.size(); ++k) {
        CHECK(a.runs[k].final_wealth == b.runs[k].final_wealth);
        CHECK(a.runs[k].final_price == b.runs[k].final_price);
    }
    CHECK(a.pooled_final_wealth == b.pooled_final_wealth);
}

TEST_CASE("a throwing trade sink is contained as a failed trial") {
    RunOptions opts;
    opts.on_trade = [](const TradeRecord&) { throw std::runtime_error("sink burst"); };
    const TrialSet set = run_trials(small_config(), 3, 5, 2, opts);
    CHECK(set.n_failed() == 3);
    for (const auto& e : set.errors) CHECK(e == "sink burst");
    CHECK(set.pooled_final_wealth.empty());
}

TEST_CASE("single-cell single-trial sweep equals the direct pipeline") {
    SweepSpec spec;
    spec.base = small_config();
    spec.axes = {{"M", {3}}, {"B", {9}}};
    spec.n_trials = 1;
    spec.base_seed = 4;
    const SweepResult res = phase_diagram(spec);
    REQUIRE(res.cells.size() == 1);

    GameConfig direct = spec.base;
    direct.seed = mix_seed(mix_seed(4, 0), 0);
    const RunOutput out = run(direct);
    const auto dp = delta_p_series(out);
    CHECK(res.cells[0].mean_sigma == doctest::Approx(sigma(dp)).epsilon(1e-12));
    CHECK(res.trials[0].ok);
    CHECK(res.cells[0].extreme == (res.cells[0].mean_sigma > 10.0));
}

TEST_CASE("sweep cells cover the cartesian product in row-major order") {
    SweepSpec spec;
    spec.base = small_config();
    spec.base.n_steps = 50;
    spec.axes = {{"M", {1, 2}}, {"B", {3, 5, 9}}};
    spec.n_trials = 1;
    const SweepResult res = sweep(spec);
    REQUIRE(res.cells.size() == 6);
    CHECK(res.cells[0].params == std::vector<std::pair<std::string, double>>{{"M", 1}, {"B", 3}});
    CHECK(res.cells[1].params == std::vector<std::pair<std::string, double>>{{"M", 1}, {"B", 5}});
    CHECK(res.cells[5].params == std::vector<std::pair<std::string, double>>{{"M", 2}, {"B", 9}});
    CHECK(res.trials.size() == 6);
}

TEST_CASE("M = 2 cells default to the higher initial price") {
    SweepSpec spec;
    spec.base = small_config();
    spec.base.n_steps = 20;
    spec.axes = {{"M", {2, 3}}};
    spec.n_trials = 1;
    const SweepResult res = sweep(spec);
    CHECK(res.cells[0].config.initial_price == doctest::Approx(10'000.0));
    CHECK(res.cells[1].config.initial_price == doctest::Approx(100.0));

    spec.base.initial_price = 777.0; // explicit base wins
    const SweepResult res2 = sweep(spec);
    CHECK(res2.cells[0].config.initial_price == doctest::Approx(777.0));
}

TEST_CASE("axis validation for the figure wrappers") {
    SweepSpec spec;
    spec.base = small_config();
    spec.axes = {{"M", {3}}};
    CHECK_THROWS_AS((void)phase_diagram(spec), std::invalid_argument);
    CHECK_THROWS_AS((void)gini_vs_B(spec), std::invalid_argument);
    spec.axes = {{"B", {3, 9}}};
    CHECK_NOTHROW((void)gini_vs_B(spec));
    spec.axes = {{"S", {1, 2}}};
    CHECK_NOTHROW((void)kurtosis_vs_S(spec));
    spec.axes = {{"C", {1, 3}}};
    CHECK_NOTHROW((void)kurtosis_vs_C(spec));

    GameConfig cfg;
    CHECK_THROWS_AS(apply_param(cfg, "Q", 1.0), std::invalid_argument);
}

TEST_CASE("pooled wealth snapshots aggregate successful trials") {
    SweepSpec spec;
    spec.base = small_config();
    spec.base.n_steps = 100;
    spec.axes = {{"B", {9}}};
    spec.n_trials = 3;
    spec.pool_wealth = true;
    const SweepResult res = sweep(spec);
    CHECK(res.cells[0].pooled_wealth.size() ==
          static_cast<size_t>(3 * spec.base.n_players));
}

TEST_CASE("ablation suite runs all three modes on one seed lineage") {
    GameConfig cfg = small_config();
    cfg.n_steps = 300;
    cfg.seed = 21;
    const auto runs = ablation_suite(cfg, 50);
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].mode == Mode::Standard);
    CHECK(runs[1].mode == Mode::ExogenousHistory);
    CHECK(runs[2].mode == Mode::RandomEntry);
    for (const auto& ab : runs) {
        CHECK(ab.output.config.seed == 21);
        CHECK(ab.output.steps.size() == 300);
        CHECK(!ab.acf.rho.empty());
        CHECK(ab.returns.values.size() == 300);
    }
    CHECK(runs[1].output.exo_digits.size() == 300);
}

} // TEST_SUITE
