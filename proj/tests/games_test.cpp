#include "diqv/games.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace diqv;

TEST(Mermin, DefinitionMatchesGhzParadox) {
    const auto def = standard_game(GameName::mermin3);
    const auto& g = def.game;
    EXPECT_EQ(g.parties(), 3u);
    EXPECT_EQ(g.input_count(), 8u);
    double total = 0.0;
    for (std::size_t in = 0; in < g.input_count(); ++in) {
        const Labels i = g.decode_inputs(in);
        const int parity = i[0] ^ i[1] ^ i[2];
        EXPECT_NEAR(g.input_probability(in), parity == 0 ? 0.25 : 0.0, 1e-15);
        total += g.input_probability(in);
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_EQ(score_round(g, {0, 0, 0}, {0, 0, 0}), 1);
    EXPECT_EQ(score_round(g, {0, 0, 0}, {1, 1, 0}), 1);
    EXPECT_EQ(score_round(g, {0, 1, 1}, {0, 0, 1}), 1);
    EXPECT_EQ(score_round(g, {0, 1, 1}, {0, 0, 0}), 0);
    EXPECT_THROW(score_round(g, {0, 2, 1}, {0, 0, 0}), std::out_of_range);
    EXPECT_THROW(score_round(g, {0, 1}, {0, 0, 0}), std::out_of_range);
}

TEST(Mermin, LocalBruteForceOverAll64Strategies) {
    const auto def = standard_game(GameName::mermin3);
    const auto best = reference::brute_force_local(def.game);
    EXPECT_NEAR(best.win, 0.75, 1e-12);
    EXPECT_NEAR(best.bell, 2.0, 1e-12);
    EXPECT_NEAR(def.robustness.p_l, 0.75, 1e-12);
    EXPECT_NEAR(def.robustness.b_l, 2.0, 1e-12);
}

TEST(Mermin, OptimalGhzStrategyWinsAlways) {
    const auto def = standard_game(GameName::mermin3);
    const auto strategy = optimal_strategy(def.game);
    EXPECT_NEAR(win_probability(def.game, strategy), 1.0, 1e-9);
    EXPECT_NEAR(bell_value(def.game, strategy), 4.0, 1e-9);
    EXPECT_TRUE(def.robustness.algebraic);
    EXPECT_NEAR(def.robustness.b_q, 4.0, 1e-12);
}

TEST(Mermin, RobustnessConstants) {
    const auto standard = standard_game(GameName::mermin3);
    const auto quarter = standard_game(GameName::mermin3, MerminConstant::quarter);
    EXPECT_NEAR(*standard.robustness.c, 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(*quarter.robustness.c, (2.0 - std::sqrt(2.0)) / 4.0, 1e-15);
    EXPECT_NEAR(*standard.robustness.c_tilde, 1.0 / (4.0 * (2.0 - std::sqrt(2.0))), 1e-15);
    EXPECT_EQ(standard_game("mermin3").game.name(), "mermin3");
    EXPECT_THROW(standard_game("magic-square"), std::invalid_argument);
}

TEST(Chsh, LocalAndQuantumValues) {
    const auto def = standard_game(GameName::chsh);
    const auto best = reference::brute_force_local(def.game);
    EXPECT_NEAR(best.win, 0.75, 1e-12);
    EXPECT_NEAR(best.bell, 2.0, 1e-12);
    const auto strategy = optimal_strategy(def.game);
    EXPECT_NEAR(win_probability(def.game, strategy), (2.0 + std::sqrt(2.0)) / 4.0, 1e-9);
    EXPECT_NEAR(bell_value(def.game, strategy), 2.0 * std::sqrt(2.0), 1e-9);
    EXPECT_FALSE(def.robustness.algebraic);
    EXPECT_FALSE(def.robustness.c.has_value());
    EXPECT_THROW(def.robustness.require_c(), std::invalid_argument);
    EXPECT_NEAR(*def.robustness.with_c(0.5).c_tilde, 1.0 / (2.0 * std::sqrt(2.0) * 0.5), 1e-15);
}

TEST(BellValue, AffineInWinProbabilityForEveryStrategy) {
    // Depolarizing the optimal state moves (p, b) along b = 8p - 4 for both games.
    for (auto name : {GameName::mermin3, GameName::chsh}) {
        const auto def = standard_game(name);
        const auto optimal = optimal_strategy(def.game);
        const auto target = def.game.parties() == 3 ? states::ghz(3) : states::bell();
        for (double lambda : {0.0, 0.2, 0.7, 1.0}) {
            const auto s = optimal.with_state(depolarize(target, lambda));
            const double p = win_probability(def.game, s);
            EXPECT_NEAR(bell_value(def.game, s), bell_value_from_win_probability(def.game, p), 1e-9);
            EXPECT_NEAR(bell_value(def.game, s), 8.0 * p - 4.0, 1e-9);
        }
    }
}

TEST(BellValue, ViolationConventions) {
    const auto def = standard_game(GameName::mermin3);
    EXPECT_NEAR(success_from_violation(def.game, def.robustness, 4.0), 1.0, 1e-15);
    EXPECT_NEAR(success_from_violation(def.game, def.robustness, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(success_from_violation(def.game, def.robustness, 2.0, ViolationConvention::correlator), 0.75, 1e-15);
    const auto chsh = standard_game(GameName::chsh);
    EXPECT_NEAR(success_from_violation(chsh.game, chsh.robustness, 2.0 * std::sqrt(2.0), ViolationConvention::correlator),
                (2.0 + std::sqrt(2.0)) / 4.0, 1e-12);
}

TEST(Encoding, RoundTripsEveryLabel) {
    const auto g = standard_game(GameName::mermin3).game;
    for (std::size_t i = 0; i < g.input_count(); ++i) EXPECT_EQ(g.encode_inputs(g.decode_inputs(i)), i);
    for (std::size_t o = 0; o < g.output_count(); ++o) EXPECT_EQ(g.encode_outputs(g.decode_outputs(o)), o);
    EXPECT_EQ(g.encode_inputs({1, 0, 0}), 4u);
}

TEST(Sampling, OptimalStrategyNeverLosesAndUsesSupportedInputs) {
    const auto def = standard_game(GameName::mermin3);
    const auto strategy = optimal_strategy(def.game);
    Rng rng(42);
    for (int k = 0; k < 2000; ++k) {
        const auto r = sample_round(strategy, def.game, rng);
        EXPECT_TRUE(r.win);
        EXPECT_EQ(r.inputs[0] ^ r.inputs[1] ^ r.inputs[2], 0);
        EXPECT_EQ(score_round(def.game, r.inputs, r.outputs), 1);
    }
}

TEST(Sampling, EmpiricalWinRateOfNoisyStrategy) {
    const auto def = standard_game(GameName::chsh);
    const auto strategy = optimal_strategy(def.game).with_state(depolarize(states::bell(), 0.3));
    const double p = win_probability(def.game, strategy);
    Rng rng(9);
    const int n = 40000;
    int wins = 0;
    for (int k = 0; k < n; ++k) wins += sample_round(strategy, def.game, rng).win ? 1 : 0;
    const double sigma = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(wins) / n, p, 5 * sigma);
}

TEST(ResponseTable, RejectsMalformedDistributions) {
    const auto g = standard_game(GameName::chsh).game;
    EXPECT_THROW(ResponseTable(g, std::vector<double>(16, 0.5)), std::invalid_argument);
    EXPECT_THROW(ResponseTable(g, std::vector<double>(3, 0.0)), std::invalid_argument);
}
