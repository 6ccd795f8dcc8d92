#include "diqv/games.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diqv {

void RobustnessModel::validate() const {
    if (!(p_l >= 0.0 && p_l < p_qm && p_qm <= 1.0)) {
        throw std::invalid_argument("robustness model needs 0 <= p_L < p_QM <= 1");
    }
    if (c && !(*c > 0.0)) throw std::invalid_argument("robustness constant c must be positive");
    if (c && c_tilde && b_q > 0.0 && std::abs(*c - 1.0 / (b_q * *c_tilde)) > 1e-9) {
        throw std::invalid_argument("robustness constants violate c = 1/(b_Q c_tilde)");
    }
    if (algebraic != (std::abs(p_qm - 1.0) <= 1e-12)) {
        throw std::invalid_argument("algebraic flag must match p_QM = 1");
    }
}

double RobustnessModel::require_c() const {
    if (!c) throw std::invalid_argument("robustness constant c is required for this game");
    return *c;
}

RobustnessModel RobustnessModel::with_c(double c_value) const {
    RobustnessModel out = *this;
    out.c = c_value;
    out.c_tilde = b_q > 0.0 ? std::optional<double>(1.0 / (b_q * c_value)) : std::nullopt;
    out.validate();
    return out;
}

NonlocalGame::NonlocalGame(std::string name, std::size_t parties, std::size_t inputs_per_party,
                           std::vector<double> input_distribution, std::vector<std::uint8_t> win_table,
                           std::optional<BellFunctional> functional)
    : name_(std::move(name)),
      parties_(parties),
      inputs_per_party_(inputs_per_party),
      input_distribution_(std::move(input_distribution)),
      win_table_(std::move(win_table)),
      functional_(std::move(functional)) {
    if (parties_ == 0 || parties_ > 4) throw std::invalid_argument("games support 1 to 4 parties");
    if (inputs_per_party_ < 1) throw std::invalid_argument("each party needs at least one input");
    std::size_t inputs = 1;
    for (std::size_t p = 0; p < parties_; ++p) inputs *= inputs_per_party_;
    if (input_distribution_.size() != inputs) throw std::invalid_argument("input distribution has the wrong size");
    double total = 0.0;
    for (double q : input_distribution_) {
        if (!(q >= 0.0)) throw std::invalid_argument("input probabilities must be non-negative");
        total += q;
    }
    if (std::abs(total - 1.0) > kTolerance) throw std::invalid_argument("input distribution does not sum to 1");
    if (win_table_.size() != inputs * output_count()) throw std::invalid_argument("win predicate must cover every input/output pair");
    if (functional_ && functional_->correlator_coefficients.size() != inputs) {
        throw std::invalid_argument("Bell functional needs one coefficient per input tuple");
    }
}

std::size_t NonlocalGame::encode_inputs(const Labels& inputs) const {
    if (inputs.size() != parties_) throw std::out_of_range("input tuple has the wrong length");
    std::size_t index = 0;
    for (auto label : inputs) {
        if (label >= inputs_per_party_) throw std::out_of_range("input label out of range");
        index = index * inputs_per_party_ + label;
    }
    return index;
}

std::size_t NonlocalGame::encode_outputs(const Labels& outputs) const {
    if (outputs.size() != parties_) throw std::out_of_range("output tuple has the wrong length");
    std::size_t index = 0;
    for (auto label : outputs) {
        if (label > 1) throw std::out_of_range("output label out of range");
        index = index * 2 + label;
    }
    return index;
}

Labels NonlocalGame::decode_inputs(std::size_t index) const {
    Labels labels(parties_);
    for (std::size_t p = parties_; p-- > 0;) {
        labels[p] = static_cast<std::uint8_t>(index % inputs_per_party_);
        index /= inputs_per_party_;
    }
    return labels;
}

Labels NonlocalGame::decode_outputs(std::size_t index) const {
    Labels labels(parties_);
    for (std::size_t p = parties_; p-- > 0;) {
        labels[p] = static_cast<std::uint8_t>(index & 1u);
        index >>= 1;
    }
    return labels;
}

namespace {

int parity(std::size_t bits) { return std::popcount(bits) & 1; }

GameDefinition make_mermin3(MerminConstant constant) {
    // Canonical GHZ game: inputs with even parity, win iff o1^o2^o3 = i1|i2|i3.
    std::vector<double> dist(8, 0.0);
    std::vector<std::uint8_t> table(64, 0);
    BellFunctional functional{std::vector<double>(8, 0.0), 8.0, -4.0};
    for (std::size_t in = 0; in < 8; ++in) {
        const bool in_support = parity(in) == 0;
        const int any = in != 0 ? 1 : 0;
        if (in_support) {
            dist[in] = 0.25;
            functional.correlator_coefficients[in] = any ? -1.0 : 1.0;
        }
        for (std::size_t out = 0; out < 8; ++out) table[in * 8 + out] = parity(out) == any ? 1 : 0;
    }
    NonlocalGame game("mermin3", 3, 2, std::move(dist), std::move(table), std::move(functional));

    RobustnessModel model;
    model.p_qm = 1.0;
    model.p_l = 0.75;
    model.b_q = 4.0;
    model.b_l = 2.0;
    model.algebraic = true;
    const double c = constant == MerminConstant::standard ? 2.0 - std::sqrt(2.0) : (2.0 - std::sqrt(2.0)) / 4.0;
    model = model.with_c(c);
    return {std::move(game), model};
}

GameDefinition make_chsh() {
    std::vector<double> dist(4, 0.25);
    std::vector<std::uint8_t> table(16, 0);
    BellFunctional functional{{1.0, 1.0, 1.0, -1.0}, 8.0, -4.0};
    for (std::size_t in = 0; in < 4; ++in) {
        const int product = (in == 3) ? 1 : 0;
        for (std::size_t out = 0; out < 4; ++out) table[in * 4 + out] = parity(out) == product ? 1 : 0;
    }
    NonlocalGame game("chsh", 2, 2, std::move(dist), std::move(table), std::move(functional));

    RobustnessModel model;
    model.p_qm = (2.0 + std::sqrt(2.0)) / 4.0;
    model.p_l = 0.75;
    model.b_q = 2.0 * std::sqrt(2.0);
    model.b_l = 2.0;
    model.algebraic = false;
    model.validate();
    return {std::move(game), model};
}

}  // namespace

GameDefinition standard_game(GameName name, MerminConstant constant) {
    switch (name) {
        case GameName::mermin3: return make_mermin3(constant);
        case GameName::chsh: return make_chsh();
    }
    throw std::invalid_argument("unknown game");
}

GameDefinition standard_game(std::string_view name, MerminConstant constant) {
    if (name == "mermin3") return standard_game(GameName::mermin3, constant);
    if (name == "chsh") return standard_game(GameName::chsh, constant);
    throw std::invalid_argument("unknown game '" + std::string(name) + "'");
}

QuantumStrategy::QuantumStrategy(DensityOperator shared_state, std::vector<std::vector<EffectPair>> effects)
    : state_(std::move(shared_state)), effects_(std::move(effects)) {
    if (effects_.size() != state_.dims().size()) {
        throw std::invalid_argument("strategy needs one measurement list per subsystem of the shared state");
    }
    for (std::size_t p = 0; p < effects_.size(); ++p) {
        const auto d = static_cast<Eigen::Index>(state_.dims()[p]);
        if (effects_[p].empty()) throw std::invalid_argument("party has no measurements");
        for (const auto& pair : effects_[p]) {
            for (const auto& e : pair) {
                if (e.rows() != d || e.cols() != d) throw std::invalid_argument("effect dimension mismatch");
                BinaryMeasurement check(e);  // Hermitian, 0 <= e <= I
            }
            if ((pair[0] + pair[1] - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTolerance) {
                throw std::invalid_argument("effects of one input must sum to the identity");
            }
        }
    }
}

QuantumStrategy QuantumStrategy::with_state(DensityOperator state) const {
    return QuantumStrategy(std::move(state), effects_);
}

ComplexMatrix QuantumStrategy::joint_effect(const Labels& inputs, const Labels& outputs) const {
    if (inputs.size() != parties() || outputs.size() != parties()) {
        throw std::invalid_argument("label tuples do not match the number of parties");
    }
    std::vector<ComplexMatrix> factors;
    factors.reserve(parties());
    for (std::size_t p = 0; p < parties(); ++p) {
        if (inputs[p] >= effects_[p].size() || outputs[p] > 1) throw std::out_of_range("label out of range");
        factors.push_back(effects_[p][inputs[p]][outputs[p]]);
    }
    return tensor_product(std::span<const ComplexMatrix>(factors));
}

QuantumStrategy optimal_strategy(const NonlocalGame& game) {
    using pauli::eigen_projector;
    auto pair_for = [](const ComplexMatrix& obs) {
        return QuantumStrategy::EffectPair{eigen_projector(obs, 0), eigen_projector(obs, 1)};
    };
    if (game.name() == "mermin3") {
        std::vector<QuantumStrategy::EffectPair> local{pair_for(pauli::x()), pair_for(pauli::y())};
        return QuantumStrategy(DensityOperator::from_pure(states::ghz(3)), {local, local, local});
    }
    if (game.name() == "chsh") {
        const double r = 1.0 / std::sqrt(2.0);
        std::vector<QuantumStrategy::EffectPair> alice{pair_for(pauli::z()), pair_for(pauli::x())};
        std::vector<QuantumStrategy::EffectPair> bob{pair_for(r * (pauli::z() + pauli::x())),
                                                     pair_for(r * (pauli::z() - pauli::x()))};
        return QuantumStrategy(DensityOperator::from_pure(states::bell()), {alice, bob});
    }
    throw std::invalid_argument("no optimal strategy known for game '" + game.name() + "'");
}

ResponseTable::ResponseTable(const NonlocalGame& game, const QuantumStrategy& strategy)
    : game_(game), outputs_(game.output_count()) {
    if (strategy.parties() != game.parties()) throw std::invalid_argument("strategy/game party count mismatch");
    for (const auto& party : strategy.effects()) {
        if (party.size() != game.inputs_per_party()) throw std::invalid_argument("strategy/game input count mismatch");
    }
    probs_.assign(game.input_count() * outputs_, 0.0);
    const ComplexMatrix& rho = strategy.shared_state().matrix();
    for (std::size_t in = 0; in < game.input_count(); ++in) {
        const Labels inputs = game.decode_inputs(in);
        double total = 0.0;
        for (std::size_t out = 0; out < outputs_; ++out) {
            const ComplexMatrix effect = strategy.joint_effect(inputs, game.decode_outputs(out));
            const double p = std::max(0.0, (effect * rho).trace().real());
            probs_[in * outputs_ + out] = p;
            total += p;
        }
        for (std::size_t out = 0; out < outputs_; ++out) probs_[in * outputs_ + out] /= total;
        for (std::size_t out = 0; out < outputs_; ++out) {
            if (game.wins(in, out)) win_probability_ += game.input_probability(in) * probs_[in * outputs_ + out];
        }
    }
}

ResponseTable::ResponseTable(const NonlocalGame& game, std::vector<double> conditional_probs)
    : game_(game), outputs_(game.output_count()), probs_(std::move(conditional_probs)) {
    if (probs_.size() != game.input_count() * outputs_) throw std::invalid_argument("response table has the wrong size");
    for (std::size_t in = 0; in < game.input_count(); ++in) {
        double total = 0.0;
        for (std::size_t out = 0; out < outputs_; ++out) {
            const double p = probs_[in * outputs_ + out];
            if (!(p >= -kTolerance)) throw std::invalid_argument("negative probability in response table");
            total += p;
            if (game.wins(in, out)) win_probability_ += game.input_probability(in) * p;
        }
        if (std::abs(total - 1.0) > kTolerance) throw std::invalid_argument("response table row does not sum to 1");
    }
}

double ResponseTable::bell_value() const {
    const auto& functional = game_.functional();
    if (!functional) throw std::invalid_argument("game '" + game_.name() + "' has no Bell functional");
    double b = 0.0;
    for (std::size_t in = 0; in < game_.input_count(); ++in) {
        const double coeff = functional->correlator_coefficients[in];
        if (coeff == 0.0) continue;
        double correlator = 0.0;
        for (std::size_t out = 0; out < outputs_; ++out) {
            correlator += (parity(out) ? -1.0 : 1.0) * probs_[in * outputs_ + out];
        }
        b += coeff * correlator;
    }
    return b;
}

double win_probability(const NonlocalGame& game, const QuantumStrategy& strategy) {
    return ResponseTable(game, strategy).win_probability();
}

double bell_value(const NonlocalGame& game, const QuantumStrategy& strategy) {
    return ResponseTable(game, strategy).bell_value();
}

double bell_value_from_win_probability(const NonlocalGame& game, double p_win) {
    if (!game.functional()) throw std::invalid_argument("game '" + game.name() + "' has no Bell functional");
    return game.functional()->slope * p_win + game.functional()->intercept;
}

double success_from_violation(const NonlocalGame& game, const RobustnessModel& model, double bell,
                              ViolationConvention convention) {
    switch (convention) {
        case ViolationConvention::ratio:
            if (!(model.b_q > 0.0)) throw std::invalid_argument("model has no quantum Bell bound");
            return bell / model.b_q;
        case ViolationConvention::correlator:
            if (!game.functional()) throw std::invalid_argument("game '" + game.name() + "' has no Bell functional");
            return (bell - game.functional()->intercept) / game.functional()->slope;
    }
    throw std::invalid_argument("unknown violation convention");
}

int score_round(const NonlocalGame& game, const Labels& inputs, const Labels& outputs) {
    return game.wins(game.encode_inputs(inputs), game.encode_outputs(outputs)) ? 1 : 0;
}

RoundRecord sample_round(const ResponseTable& table, const NonlocalGame& game, Rng& rng) {
    const std::size_t in = rng.discrete(game.input_distribution());
    const std::size_t out = rng.discrete(table.outcomes(in));
    return {game.decode_inputs(in), game.decode_outputs(out), game.wins(in, out)};
}

RoundRecord sample_round(const QuantumStrategy& strategy, const NonlocalGame& game, Rng& rng) {
    return sample_round(ResponseTable(game, strategy), game, rng);
}

}  // namespace diqv
