#include "diqv/sources.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace diqv;

namespace {

const GameDefinition& mermin() {
    static const GameDefinition def = standard_game(GameName::mermin3);
    return def;
}

// Random two- or three-branch mixture of per-round depolarized GHZ states.
SourceModel random_quantum_mixture(std::size_t copies, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t branches = 2 + gen() % 2;
    std::vector<double> weights(branches);
    for (double& w : weights) w = 0.1 + u(gen);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    std::vector<RoundState> pool;
    std::vector<std::vector<std::size_t>> index(branches);
    for (std::size_t b = 0; b < branches; ++b) {
        for (std::size_t k = 0; k < copies; ++k) {
            pool.emplace_back(depolarize(states::ghz(3), u(gen)));
            index[b].push_back(pool.size() - 1);
        }
    }
    return SourceModel::mixture(weights, index, pool);
}

}  // namespace

TEST(SourceModel, FactoriesAndValidation) {
    const auto ghz = DensityOperator::from_pure(states::ghz(3));
    EXPECT_EQ(SourceModel::iid(ghz, 5).copies(), 5u);
    EXPECT_TRUE(SourceModel::iid(ghz, 5).independent_copies());
    EXPECT_EQ(SourceModel::bernoulli({0.9, 0.8}).kind(), SourceKind::bernoulli);
    EXPECT_FALSE(SourceModel::bernoulli({0.9}).is_quantum());
    EXPECT_THROW(SourceModel::bernoulli({1.2}), std::invalid_argument);
    EXPECT_THROW(SourceModel::mixture_of_iid({0.5, 0.6}, {RoundState{0.9}, RoundState{0.5}}, 3), std::invalid_argument);
    EXPECT_THROW(SourceModel::mixture_of_iid({0.5, 0.5}, {RoundState{0.9}, RoundState{ghz}}, 3), std::invalid_argument);
    EXPECT_THROW(SourceModel::iid(ghz, 0), std::invalid_argument);
}

TEST(SourceSpec, BuildsEveryKind) {
    SourceSpec iid;
    iid.kind = SourceKind::iid;
    iid.copies = 4;
    iid.state = StateSpec{"ghz", 3, 0.2};
    EXPECT_EQ(make_source(iid).copies(), 4u);

    SourceSpec bern;
    bern.kind = SourceKind::bernoulli;
    bern.copies = 3;
    bern.p = 0.9;
    EXPECT_EQ(make_source(bern).copies(), 3u);

    SourceSpec mix;
    mix.kind = SourceKind::mixture;
    mix.copies = 6;
    mix.weights = {0.5, 0.5};
    mix.branches.resize(2);
    mix.branches[0].state = StateSpec{"ghz", 3, 0.0};
    mix.branches[1].state = StateSpec{"maximally_mixed", 8, 0.0};
    const auto m = make_source(mix);
    EXPECT_EQ(m.branch_count(), 2u);
    EXPECT_FALSE(m.independent_copies());

    mix.weights = {0.5};
    EXPECT_THROW(make_source(mix), std::invalid_argument);
}

TEST(RoundEngine, IidSuccessIsConstantAlongAnyHistory) {
    const RoundEngine engine(SourceModel::iid(depolarize(states::ghz(3), 0.3), 20), mermin().game);
    const double expected = 1.0 - 0.3 + 0.3 * 0.5;
    Rng rng(5);
    auto state = engine.initial_state();
    for (int k = 0; k < 20; ++k) {
        auto r = engine.conditional_round(std::move(state), rng);
        EXPECT_NEAR(r.success_prob, expected, 1e-12);
        state = std::move(r.next);
    }
    EXPECT_THROW(engine.conditional_success(state), std::out_of_range);
}

TEST(RoundEngine, PosteriorStaysNormalized) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const RoundEngine engine(random_quantum_mixture(6, gen), mermin().game);
        Rng rng(gen());
        auto state = engine.initial_state();
        for (int k = 0; k < 6; ++k) {
            auto r = engine.conditional_round(std::move(state), rng);
            state = std::move(r.next);
            const double total = std::accumulate(state.posterior_weights.begin(), state.posterior_weights.end(), 0.0);
            EXPECT_NEAR(total, 1.0, 1e-12);
            for (double w : state.posterior_weights) EXPECT_GE(w, 0.0);
        }
    }
}

TEST(RoundEngine, CoinFlipSourceCollapsesOnALoss) {
    const auto ghz = DensityOperator::from_pure(states::ghz(3));
    const auto mixed = states::maximally_mixed(8);
    const RoundEngine engine(SourceModel::mixture_of_iid({0.5, 0.5}, {RoundState{ghz}, RoundState{mixed}}, 10),
                             mermin().game);
    auto state = engine.initial_state();
    EXPECT_NEAR(engine.conditional_success(state), 0.75, 1e-12);
    // A lost round is impossible for the GHZ branch, so the posterior moves
    // entirely to the mixed branch.
    RoundRecord loss{{0, 0, 0}, {1, 0, 0}, false};
    const auto seq = engine.conditional_success_sequence({loss, loss});
    EXPECT_NEAR(seq[0], 0.75, 1e-12);
    EXPECT_NEAR(seq[1], 0.5, 1e-12);
    RoundRecord win{{0, 0, 0}, {0, 0, 0}, true};
    const auto wins = engine.conditional_success_sequence({win, win});
    // Output 000 at input 000 has probability 1/4 under GHZ and 1/8 under
    // I/8, so one such win doubles the odds in favour of GHZ.
    EXPECT_NEAR(wins[1], (2.0 * 1.0 + 1.0 * 0.5) / 3.0, 1e-12);
    EXPECT_THROW(engine.skip_round(state), std::logic_error);
}

TEST(RoundEngine, BernoulliMixtureUsesWinLikelihoods) {
    const RoundEngine engine(SourceModel::mixture_of_iid({0.25, 0.75}, {RoundState{0.9}, RoundState{0.5}}, 4),
                             mermin().game);
    RoundRecord win;
    win.win = true;
    const auto seq = engine.conditional_success_sequence({win, win});
    const double w0 = 0.25 * 0.9 / (0.25 * 0.9 + 0.75 * 0.5);
    EXPECT_NEAR(seq[0], 0.25 * 0.9 + 0.75 * 0.5, 1e-15);
    EXPECT_NEAR(seq[1], w0 * 0.9 + (1 - w0) * 0.5, 1e-15);
    EXPECT_NEAR(engine.branch_average_success(0), 0.9, 1e-15);
    EXPECT_NEAR(engine.branch_average_success({win, win}), 0.5 * (seq[0] + seq[1]), 1e-15);
}

TEST(ConditionalState, BayesianUpdateMatchesExplicitDensityOperators) {
    std::mt19937_64 gen(31);
    const auto& game = mermin().game;
    const auto strategy = optimal_strategy(game);
    for (std::size_t copies = 1; copies <= 3; ++copies) {
        for (int trial = 0; trial < 4; ++trial) {
            const SourceModel model = random_quantum_mixture(copies, gen);
            const RoundEngine engine(model, game);
            Rng rng(gen());
            auto state = engine.initial_state();
            for (std::size_t k = 0; k < copies; ++k) {
                const double oracle = reference::explicit_conditional_success(model, game, strategy, state.history);
                EXPECT_NEAR(engine.conditional_success(state), oracle, 1e-9);
                state = engine.conditional_round(std::move(state), rng).next;
            }
        }
    }
}

TEST(ConditionalState, StandaloneWrapperMatchesEngine) {
    const auto& game = mermin().game;
    const auto model = SourceModel::iid(depolarize(states::ghz(3), 0.1), 3);
    const RoundEngine engine(model, game);
    Rng a(77), b(77);
    const auto via_engine = engine.conditional_round(engine.initial_state(), a);
    const auto via_wrapper = conditional_round(model, engine.initial_state(), optimal_strategy(game), game, b);
    EXPECT_EQ(via_engine.record.inputs, via_wrapper.record.inputs);
    EXPECT_EQ(via_engine.record.outputs, via_wrapper.record.outputs);
    EXPECT_EQ(via_engine.success_prob, via_wrapper.success_prob);
}
