#pragma once

// Sources of copies, including correlated (non-IID) ones, and the
// conditional-state bookkeeping used when rounds are measured in sequence.
//
// Correlated sources are finite convex mixtures of product sequences,
//     sigma^N = sum_b w_b  sigma_b^(1) (x) ... (x) sigma_b^(N).
// Conditioning such a state on the records of rounds 1..j-1 keeps it a
// mixture of the same branches with weights w_b * Pr[records | b], so the
// conditional state of round j is sum_b w_b' sigma_b^(j) and never needs the
// full exponential-size operator.

#include "diqv/games.hpp"
#include "diqv/quantum.hpp"
#include "diqv/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace diqv {

enum class SourceKind { iid, independent, mixture, bernoulli };

std::string to_string(SourceKind kind);

/// A round either carries a quantum state or an abstract success probability.
using RoundState = std::variant<DensityOperator, double>;

class SourceModel {
public:
    static SourceModel iid(DensityOperator state, std::size_t copies);
    static SourceModel independent(std::vector<DensityOperator> states);
    /// Abstract source: round k succeeds with probability probs[k].
    static SourceModel bernoulli(std::vector<double> probs);
    /// General mixture. `branches[b][k]` indexes `pool` for round k of branch b.
    static SourceModel mixture(std::vector<double> weights, std::vector<std::vector<std::size_t>> branches,
                               std::vector<RoundState> pool);
    /// Mixture of IID branches: branch b emits pool[b] in every round.
    static SourceModel mixture_of_iid(std::vector<double> weights, std::vector<RoundState> branch_states,
                                      std::size_t copies);

    SourceKind kind() const { return kind_; }
    std::size_t copies() const { return copies_; }
    bool is_quantum() const { return quantum_; }
    bool independent_copies() const { return kind_ != SourceKind::mixture; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t branch_count() const { return branches_.size(); }
    std::size_t state_index(std::size_t branch, std::size_t round) const { return branches_[branch][round]; }
    const std::vector<RoundState>& pool() const { return pool_; }

private:
    SourceModel(SourceKind kind, std::vector<double> weights, std::vector<std::vector<std::size_t>> branches,
                std::vector<RoundState> pool);

    SourceKind kind_;
    std::size_t copies_ = 0;
    bool quantum_ = false;
    std::vector<double> weights_;
    std::vector<std::vector<std::size_t>> branches_;
    std::vector<RoundState> pool_;
};

/// Declarative description of a source, as read from JSON or the CLI.
struct StateSpec {
    std::string name = "ghz";   ///< any standard_state name
    std::size_t param = 3;      ///< qubits for ghz, dimension for maximally_mixed
    double depolarize = 0.0;    ///< lambda in (1 - lambda)|psi><psi| + lambda I/d
};

struct BranchSpec {
    std::optional<StateSpec> state;      ///< same state every round
    std::vector<StateSpec> states;       ///< one state per round
    std::optional<double> p;             ///< abstract constant success probability
    std::vector<double> probs;           ///< abstract per-round success probabilities
};

struct SourceSpec {
    SourceKind kind = SourceKind::iid;
    std::size_t copies = 0;
    std::optional<StateSpec> state;      ///< iid
    std::vector<StateSpec> states;       ///< independent
    std::vector<double> probs;           ///< bernoulli (or use p + copies)
    std::optional<double> p;
    std::vector<double> weights;         ///< mixture
    std::vector<BranchSpec> branches;    ///< mixture
};

DensityOperator make_state(const StateSpec& spec);

/// Validated model; std::invalid_argument on malformed weights or lengths.
SourceModel make_source(const SourceSpec& spec);

struct SourceState {
    std::size_t round_index = 0;
    std::vector<double> posterior_weights;
    std::vector<RoundRecord> history;
};

struct ConditionalRound {
    double success_prob = 0.0;
    RoundRecord record;
    SourceState next;
};

/// Smallest weight kept after a Bayesian update; smaller ones are zeroed.
inline constexpr double kPruneWeight = 1e-300;

/// Source bound to a game and a set of measurements, with the per-state
/// outcome tables precomputed. Immutable; share it across threads and give
/// each simulation its own SourceState and Rng.
class RoundEngine {
public:
    /// Quantum sources are measured with `strategy`'s effects (its shared
    /// state is ignored); abstract sources ignore the strategy.
    RoundEngine(SourceModel model, NonlocalGame game, const QuantumStrategy& strategy);
    /// Uses the game's optimal measurements.
    RoundEngine(SourceModel model, NonlocalGame game);

    const SourceModel& model() const { return model_; }
    const NonlocalGame& game() const { return game_; }

    SourceState initial_state() const;

    /// Win probability of round state.round_index given the recorded past.
    double conditional_success(const SourceState& state) const;

    /// Measure the next copy: draw inputs and outputs from the conditional
    /// state and update the posterior.
    ConditionalRound conditional_round(SourceState state, Rng& rng) const;

    /// Set the next copy aside unmeasured. Only valid for independent copies,
    /// where no conditioning takes place.
    SourceState skip_round(SourceState state) const;

    /// Mean per-round success probability inside one branch.
    double branch_average_success(std::size_t branch) const;

    /// Conditional success probabilities along a realized history.
    std::vector<double> conditional_success_sequence(const std::vector<RoundRecord>& history) const;

    /// Mean of conditional_success_sequence(history).
    double branch_average_success(const std::vector<RoundRecord>& history) const;

    /// Per-round success probability of pool entry `index`.
    double state_success(std::size_t index) const { return success_[index]; }

private:
    double likelihood(std::size_t pool_index, const RoundRecord& record) const;
    SourceState update(SourceState state, const RoundRecord& record) const;

    SourceModel model_;
    NonlocalGame game_;
    std::vector<std::optional<ResponseTable>> tables_;
    std::vector<double> success_;
};

/// One-shot convenience wrapper; builds a RoundEngine each call.
ConditionalRound conditional_round(const SourceModel& model, SourceState state, const QuantumStrategy& strategy,
                                   const NonlocalGame& game, Rng& rng);

}  // namespace diqv
