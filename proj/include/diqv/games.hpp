#pragma once

// Nonlocal games with binary outputs, quantum strategies, and the constants
// linking game score to extractability.
//
// Input and output tuples are encoded as integers with party 1 as the most
// significant digit, matching the tensor ordering in quantum.hpp.

#include "diqv/quantum.hpp"
#include "diqv/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace diqv {

using Labels = std::vector<std::uint8_t>;

/// Bell functional written on correlators, b = sum_i coeff_i * E_i with
/// E_i = sum_o (-1)^{o_1 + ... + o_n} p(o|i). `slope` and `intercept` record
/// the affine relation b = slope * p_win + intercept that holds for the game.
struct BellFunctional {
    std::vector<double> correlator_coefficients;
    double slope = 0.0;
    double intercept = 0.0;
};

/// How a Bell violation is translated into a success probability.
enum class ViolationConvention {
    ratio,       ///< p = b / b_Q
    correlator,  ///< invert the game's own affine map
};

struct RobustnessModel {
    double p_qm = 1.0;
    double p_l = 0.0;
    double b_q = 0.0;
    double b_l = 0.0;
    /// p_eta = p_qm - c * eta. Absent for games where the caller must supply it.
    std::optional<double> c;
    /// Violation-side constant: extractability >= 1 - c_tilde * eps_tilde.
    std::optional<double> c_tilde;
    bool algebraic = false;

    /// Throws std::invalid_argument on broken invariants.
    void validate() const;
    /// The robustness constant, or std::invalid_argument when unset.
    double require_c() const;
    /// Copy with c replaced and c_tilde kept consistent (c = 1/(b_Q c_tilde)).
    RobustnessModel with_c(double c_value) const;
};

class NonlocalGame {
public:
    /// `win_table[input_index * output_count() + output_index]` is 1 on a win.
    NonlocalGame(std::string name, std::size_t parties, std::size_t inputs_per_party,
                 std::vector<double> input_distribution, std::vector<std::uint8_t> win_table,
                 std::optional<BellFunctional> functional = std::nullopt);

    const std::string& name() const { return name_; }
    std::size_t parties() const { return parties_; }
    std::size_t inputs_per_party() const { return inputs_per_party_; }
    std::size_t input_count() const { return input_distribution_.size(); }
    std::size_t output_count() const { return std::size_t{1} << parties_; }

    double input_probability(std::size_t input_index) const { return input_distribution_[input_index]; }
    const std::vector<double>& input_distribution() const { return input_distribution_; }
    bool wins(std::size_t input_index, std::size_t output_index) const {
        return win_table_[input_index * output_count() + output_index] != 0;
    }
    const std::vector<std::uint8_t>& win_table() const { return win_table_; }
    const std::optional<BellFunctional>& functional() const { return functional_; }

    std::size_t encode_inputs(const Labels& inputs) const;
    std::size_t encode_outputs(const Labels& outputs) const;
    Labels decode_inputs(std::size_t index) const;
    Labels decode_outputs(std::size_t index) const;

private:
    std::string name_;
    std::size_t parties_;
    std::size_t inputs_per_party_;
    std::vector<double> input_distribution_;
    std::vector<std::uint8_t> win_table_;
    std::optional<BellFunctional> functional_;
};

enum class GameName { mermin3, chsh };

/// Which of the two published Mermin robustness constants to attach.
enum class MerminConstant {
    standard,  ///< c = 2 - sqrt(2)
    quarter,   ///< c = (2 - sqrt(2)) / 4
};

struct GameDefinition {
    NonlocalGame game;
    RobustnessModel robustness;
};

GameDefinition standard_game(GameName name, MerminConstant constant = MerminConstant::standard);
/// "mermin3" or "chsh"; std::invalid_argument otherwise.
GameDefinition standard_game(std::string_view name, MerminConstant constant = MerminConstant::standard);

/// Shared state plus, per party and input, the outcome-0 and outcome-1 effects.
class QuantumStrategy {
public:
    using EffectPair = std::array<ComplexMatrix, 2>;

    QuantumStrategy(DensityOperator shared_state, std::vector<std::vector<EffectPair>> effects);

    const DensityOperator& shared_state() const { return state_; }
    const std::vector<std::vector<EffectPair>>& effects() const { return effects_; }
    std::size_t parties() const { return effects_.size(); }

    /// Same measurements on a different state.
    QuantumStrategy with_state(DensityOperator state) const;

    /// Tensor product of the parties' effects for one input/output pair.
    ComplexMatrix joint_effect(const Labels& inputs, const Labels& outputs) const;

private:
    DensityOperator state_;
    std::vector<std::vector<EffectPair>> effects_;
};

/// GHZ with X/Y for mermin3, Bell state with the standard CHSH angles for chsh.
QuantumStrategy optimal_strategy(const NonlocalGame& game);

/// p(o|i) for all input/output pairs, laid out like the win table.
class ResponseTable {
public:
    ResponseTable(const NonlocalGame& game, const QuantumStrategy& strategy);
    ResponseTable(const NonlocalGame& game, std::vector<double> conditional_probs);

    double probability(std::size_t input_index, std::size_t output_index) const {
        return probs_[input_index * outputs_ + output_index];
    }
    std::span<const double> outcomes(std::size_t input_index) const {
        return {probs_.data() + input_index * outputs_, outputs_};
    }
    /// sum_i q(i) sum_{winning o} p(o|i)
    double win_probability() const { return win_probability_; }
    double bell_value() const;

private:
    NonlocalGame game_;
    std::size_t outputs_;
    std::vector<double> probs_;
    double win_probability_ = 0.0;
};

double win_probability(const NonlocalGame& game, const QuantumStrategy& strategy);

/// Direct evaluation of the game's Bell functional; throws when the game has none.
double bell_value(const NonlocalGame& game, const QuantumStrategy& strategy);

/// Game-specific affine map from win probability to Bell value.
double bell_value_from_win_probability(const NonlocalGame& game, double p_win);

/// Success probability implied by a Bell value.
double success_from_violation(const NonlocalGame& game, const RobustnessModel& model,
                              double bell, ViolationConvention convention = ViolationConvention::ratio);

struct RoundRecord {
    Labels inputs;
    Labels outputs;
    bool win = false;
};

/// 1 iff the win predicate holds; std::out_of_range for bad labels.
int score_round(const NonlocalGame& game, const Labels& inputs, const Labels& outputs);

/// Inputs from the game's distribution, outputs from the Born rule.
RoundRecord sample_round(const QuantumStrategy& strategy, const NonlocalGame& game, Rng& rng);
RoundRecord sample_round(const ResponseTable& table, const NonlocalGame& game, Rng& rng);

}  // namespace diqv
