#include "diqv/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diqv {

std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::iid: return "iid";
        case SourceKind::independent: return "independent";
        case SourceKind::mixture: return "mixture";
        case SourceKind::bernoulli: return "bernoulli";
    }
    return "unknown";
}

SourceModel::SourceModel(SourceKind kind, std::vector<double> weights,
                         std::vector<std::vector<std::size_t>> branches, std::vector<RoundState> pool)
    : kind_(kind), weights_(std::move(weights)), branches_(std::move(branches)), pool_(std::move(pool)) {
    if (branches_.empty() || weights_.size() != branches_.size()) {
        throw std::invalid_argument("source needs one weight per branch");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("branch weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > kTolerance) throw std::invalid_argument("branch weights must sum to 1");
    copies_ = branches_.front().size();
    if (copies_ == 0) throw std::invalid_argument("source must emit at least one copy");
    for (const auto& branch : branches_) {
        if (branch.size() != copies_) throw std::invalid_argument("every branch must cover all N rounds");
        for (std::size_t idx : branch) {
            if (idx >= pool_.size()) throw std::invalid_argument("branch references an unknown state");
        }
    }
    if (pool_.empty()) throw std::invalid_argument("source has no states");
    quantum_ = std::holds_alternative<DensityOperator>(pool_.front());
    for (const auto& s : pool_) {
        if (std::holds_alternative<DensityOperator>(s) != quantum_) {
            throw std::invalid_argument("a source cannot mix quantum and abstract rounds");
        }
        if (const double* p = std::get_if<double>(&s); p && !(*p >= 0.0 && *p <= 1.0)) {
            throw std::invalid_argument("success probabilities must lie in [0, 1]");
        }
    }
    if (quantum_) {
        const auto& dims = std::get<DensityOperator>(pool_.front()).dims();
        for (const auto& s : pool_) {
            if (std::get<DensityOperator>(s).dims() != dims) throw std::invalid_argument("all rounds must share one system layout");
        }
    }
}

SourceModel SourceModel::iid(DensityOperator state, std::size_t copies) {
    std::vector<RoundState> pool{std::move(state)};
    return SourceModel(SourceKind::iid, {1.0}, {std::vector<std::size_t>(copies, 0)}, std::move(pool));
}

SourceModel SourceModel::independent(std::vector<DensityOperator> states) {
    std::vector<std::size_t> rounds(states.size());
    std::iota(rounds.begin(), rounds.end(), std::size_t{0});
    std::vector<RoundState> pool(std::make_move_iterator(states.begin()), std::make_move_iterator(states.end()));
    return SourceModel(SourceKind::independent, {1.0}, {std::move(rounds)}, std::move(pool));
}

SourceModel SourceModel::bernoulli(std::vector<double> probs) {
    std::vector<std::size_t> rounds(probs.size());
    std::iota(rounds.begin(), rounds.end(), std::size_t{0});
    std::vector<RoundState> pool(probs.begin(), probs.end());
    return SourceModel(SourceKind::bernoulli, {1.0}, {std::move(rounds)}, std::move(pool));
}

SourceModel SourceModel::mixture(std::vector<double> weights, std::vector<std::vector<std::size_t>> branches,
                                 std::vector<RoundState> pool) {
    return SourceModel(SourceKind::mixture, std::move(weights), std::move(branches), std::move(pool));
}

SourceModel SourceModel::mixture_of_iid(std::vector<double> weights, std::vector<RoundState> branch_states,
                                        std::size_t copies) {
    std::vector<std::vector<std::size_t>> branches;
    for (std::size_t b = 0; b < branch_states.size(); ++b) branches.emplace_back(copies, b);
    return mixture(std::move(weights), std::move(branches), std::move(branch_states));
}

DensityOperator make_state(const StateSpec& spec) {
    const AnyState state = standard_state(spec.name, spec.param);
    if (const auto* psi = std::get_if<StateVector>(&state)) return depolarize(*psi, spec.depolarize);
    const auto& rho = std::get<DensityOperator>(state);
    if (spec.depolarize != 0.0) {
        if (!(spec.depolarize >= 0.0 && spec.depolarize <= 1.0)) throw std::invalid_argument("depolarizing weight outside [0, 1]");
        const auto d = static_cast<Eigen::Index>(rho.dim());
        ComplexMatrix m = (1.0 - spec.depolarize) * rho.matrix() +
                          (spec.depolarize / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
        return DensityOperator(std::move(m), rho.dims());
    }
    return rho;
}

namespace {

std::vector<double> bernoulli_probs(const std::vector<double>& probs, std::optional<double> p, std::size_t copies) {
    if (!probs.empty()) {
        if (copies != 0 && copies != probs.size()) throw std::invalid_argument("probs length differs from N");
        return probs;
    }
    if (!p) throw std::invalid_argument("bernoulli source needs probs or p");
    if (copies == 0) throw std::invalid_argument("bernoulli source with constant p needs N");
    return std::vector<double>(copies, *p);
}

}  // namespace

SourceModel make_source(const SourceSpec& spec) {
    switch (spec.kind) {
        case SourceKind::iid:
            if (!spec.state) throw std::invalid_argument("iid source needs a state");
            if (spec.copies == 0) throw std::invalid_argument("iid source needs N > 0");
            return SourceModel::iid(make_state(*spec.state), spec.copies);
        case SourceKind::independent: {
            if (spec.states.empty()) throw std::invalid_argument("independent source needs states");
            if (spec.copies != 0 && spec.copies != spec.states.size()) throw std::invalid_argument("states length differs from N");
            std::vector<DensityOperator> states;
            for (const auto& s : spec.states) states.push_back(make_state(s));
            return SourceModel::independent(std::move(states));
        }
        case SourceKind::bernoulli:
            return SourceModel::bernoulli(bernoulli_probs(spec.probs, spec.p, spec.copies));
        case SourceKind::mixture: {
            if (spec.branches.empty() || spec.branches.size() != spec.weights.size()) {
                throw std::invalid_argument("mixture needs one weight per branch");
            }
            std::vector<RoundState> pool;
            std::vector<std::vector<std::size_t>> branches;
            for (const auto& branch : spec.branches) {
                std::vector<std::size_t> rounds;
                if (branch.state) {
                    if (spec.copies == 0) throw std::invalid_argument("mixture with constant branches needs N");
                    pool.emplace_back(make_state(*branch.state));
                    rounds.assign(spec.copies, pool.size() - 1);
                } else if (!branch.states.empty()) {
                    for (const auto& s : branch.states) {
                        pool.emplace_back(make_state(s));
                        rounds.push_back(pool.size() - 1);
                    }
                } else {
                    for (double p : bernoulli_probs(branch.probs, branch.p, spec.copies)) {
                        pool.emplace_back(p);
                        rounds.push_back(pool.size() - 1);
                    }
                }
                if (spec.copies != 0 && rounds.size() != spec.copies) throw std::invalid_argument("branch length differs from N");
                branches.push_back(std::move(rounds));
            }
            return SourceModel::mixture(spec.weights, std::move(branches), std::move(pool));
        }
    }
    throw std::invalid_argument("unknown source kind");
}

RoundEngine::RoundEngine(SourceModel model, NonlocalGame game, const QuantumStrategy& strategy)
    : model_(std::move(model)), game_(std::move(game)) {
    tables_.reserve(model_.pool().size());
    success_.reserve(model_.pool().size());
    for (const auto& s : model_.pool()) {
        if (const auto* rho = std::get_if<DensityOperator>(&s)) {
            ResponseTable table(game_, strategy.with_state(*rho));
            success_.push_back(table.win_probability());
            tables_.emplace_back(std::move(table));
        } else {
            success_.push_back(std::get<double>(s));
            tables_.emplace_back(std::nullopt);
        }
    }
}

RoundEngine::RoundEngine(SourceModel model, NonlocalGame game)
    : RoundEngine(std::move(model), game, optimal_strategy(game)) {}

SourceState RoundEngine::initial_state() const { return {0, model_.weights(), {}}; }

double RoundEngine::conditional_success(const SourceState& state) const {
    if (state.round_index >= model_.copies()) throw std::out_of_range("source exhausted");
    double p = 0.0;
    for (std::size_t b = 0; b < model_.branch_count(); ++b) {
        const double w = state.posterior_weights[b];
        if (w > 0.0) p += w * success_[model_.state_index(b, state.round_index)];
    }
    return std::clamp(p, 0.0, 1.0);
}

double RoundEngine::likelihood(std::size_t pool_index, const RoundRecord& record) const {
    if (const auto& table = tables_[pool_index]) {
        return table->probability(game_.encode_inputs(record.inputs), game_.encode_outputs(record.outputs));
    }
    const double p = success_[pool_index];
    return record.win ? p : 1.0 - p;
}

SourceState RoundEngine::update(SourceState state, const RoundRecord& record) const {
    auto& w = state.posterior_weights;
    if (model_.branch_count() > 1) {
        double total = 0.0;
        for (std::size_t b = 0; b < w.size(); ++b) {
            if (w[b] == 0.0) continue;
            w[b] *= likelihood(model_.state_index(b, state.round_index), record);
            total += w[b];
        }
        if (!(total > 0.0)) throw std::invalid_argument("recorded round has zero probability under every branch");
        for (double& x : w) {
            x /= total;
            if (x < kPruneWeight) x = 0.0;
        }
        const double renorm = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= renorm;
    }
    state.history.push_back(record);
    ++state.round_index;
    return state;
}

ConditionalRound RoundEngine::conditional_round(SourceState state, Rng& rng) const {
    const double success = conditional_success(state);
    RoundRecord record;
    if (model_.is_quantum()) {
        const std::size_t in = rng.discrete(game_.input_distribution());
        std::vector<double> outcomes(game_.output_count(), 0.0);
        for (std::size_t b = 0; b < model_.branch_count(); ++b) {
            const double w = state.posterior_weights[b];
            if (w == 0.0) continue;
            const auto row = tables_[model_.state_index(b, state.round_index)]->outcomes(in);
            for (std::size_t o = 0; o < outcomes.size(); ++o) outcomes[o] += w * row[o];
        }
        const std::size_t out = rng.discrete(outcomes);
        record = {game_.decode_inputs(in), game_.decode_outputs(out), game_.wins(in, out)};
    } else {
        record.win = rng.bernoulli(success);
    }
    SourceState next = update(std::move(state), record);
    return {success, std::move(record), std::move(next)};
}

SourceState RoundEngine::skip_round(SourceState state) const {
    if (!model_.independent_copies()) throw std::logic_error("unmeasured rounds need a source with independent copies");
    if (state.round_index >= model_.copies()) throw std::out_of_range("source exhausted");
    ++state.round_index;
    return state;
}

double RoundEngine::branch_average_success(std::size_t branch) const {
    if (branch >= model_.branch_count()) throw std::out_of_range("branch index out of range");
    double sum = 0.0;
    for (std::size_t k = 0; k < model_.copies(); ++k) sum += success_[model_.state_index(branch, k)];
    return sum / static_cast<double>(model_.copies());
}

std::vector<double> RoundEngine::conditional_success_sequence(const std::vector<RoundRecord>& history) const {
    if (history.size() > model_.copies()) throw std::invalid_argument("history is longer than the source");
    std::vector<double> seq;
    seq.reserve(history.size());
    SourceState state = initial_state();
    for (const auto& record : history) {
        seq.push_back(conditional_success(state));
        state = update(std::move(state), record);
    }
    return seq;
}

double RoundEngine::branch_average_success(const std::vector<RoundRecord>& history) const {
    if (history.empty()) throw std::invalid_argument("empty history");
    const auto seq = conditional_success_sequence(history);
    return std::accumulate(seq.begin(), seq.end(), 0.0) / static_cast<double>(seq.size());
}

ConditionalRound conditional_round(const SourceModel& model, SourceState state, const QuantumStrategy& strategy,
                                   const NonlocalGame& game, Rng& rng) {
    return RoundEngine(model, game, strategy).conditional_round(std::move(state), rng);
}

}  // namespace diqv
