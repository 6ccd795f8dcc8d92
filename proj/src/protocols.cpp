#include "diqv/protocols.hpp"

#include <cmath>
#include <stdexcept>

namespace diqv {

namespace {

void require_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
}

constexpr std::uint64_t kRoundStream = 0;
constexpr std::uint64_t kCoinStream = 1;

}  // namespace

std::string to_string(Outcome o) { return o == Outcome::success ? "success" : "inconclusive"; }

std::uint64_t required_successes(double p1, std::uint64_t n) {
    const double x = p1 * static_cast<double>(n);
    const double nearest = std::round(x);
    const double k = std::abs(x - nearest) <= 1e-9 ? nearest : std::ceil(x);
    return k <= 0.0 ? 0 : static_cast<std::uint64_t>(k);
}

VerificationPlan plan_verification(const GameDefinition& game, double eta, double eps1, double delta) {
    return plan_verification(game.game, game.robustness, eta, eps1, delta);
}

VerificationPlan plan_verification(const NonlocalGame& game, const RobustnessModel& robustness, double eta,
                                   double eps1, double delta) {
    robustness.validate();
    require_open_unit(eta, "eta");
    const double c = robustness.require_c();
    VerificationPlan plan;
    plan.game = game.name();
    plan.robustness = robustness;
    plan.eta = eta;
    plan.eps1 = eps1;
    plan.eps2 = c * eta;
    plan.delta = delta;
    if (!(eps1 < plan.eps2)) throw std::invalid_argument("eps1 must be below c * eta");
    plan.copies = verification_sample_size(robustness.p_qm, eps1, plan.eps2, delta);
    plan.p1 = robustness.p_qm - eps1;
    plan.p2 = robustness.p_qm - plan.eps2;
    return plan;
}

VerificationPlan plan_allpass_verification(const NonlocalGame& game, const RobustnessModel& robustness, double eta,
                                           double delta) {
    robustness.validate();
    if (!robustness.algebraic) throw std::invalid_argument("all-pass verification needs p_QM = 1");
    require_open_unit(eta, "eta");
    const double c = robustness.require_c();
    VerificationPlan plan;
    plan.game = game.name();
    plan.robustness = robustness;
    plan.eta = eta;
    plan.eps1 = 0.0;
    plan.eps2 = c * eta;
    plan.delta = delta;
    plan.copies = allpass_sample_size(c, eta, delta);
    plan.p1 = 1.0;
    plan.p2 = 1.0 - plan.eps2;
    plan.halt_on_first_failure = true;
    return plan;
}

CertificationPlan plan_certification(const NonlocalGame& game, const RobustnessModel& robustness, double eta_c,
                                     double mu, double eps1, double delta) {
    robustness.validate();
    if (!(mu < 1.0)) throw std::invalid_argument("no certificate remains: mu must be below 1");
    require_open_unit(mu, "mu");
    require_open_unit(eta_c, "eta_c");
    const double c = robustness.require_c();
    CertificationPlan plan;
    plan.game = game.name();
    plan.robustness = robustness;
    plan.eta_c = eta_c;
    plan.mu = mu;
    plan.eps1 = eps1;
    plan.eps2 = c * eta_c * (1.0 - mu);
    plan.eta = plan.eps2 / c;
    plan.delta = delta;
    if (!(eps1 < plan.eps2)) throw std::invalid_argument("eps1 must be below c * eta_c * (1 - mu)");
    plan.copies = certification_sample_size(mu, robustness.p_qm, eps1, plan.eps2, delta);
    plan.p1 = robustness.p_qm - eps1;
    plan.p2 = robustness.p_qm - plan.eps2;
    return plan;
}

ProtocolRun run_verification(const VerificationPlan& plan, const RoundEngine& source, std::uint64_t seed) {
    if (source.model().copies() < plan.copies) throw std::invalid_argument("source has fewer copies than the plan needs");
    Rng rng(Rng::derive(seed, kRoundStream));
    ProtocolRun run;
    auto& t = run.transcript;
    t.rounds.reserve(plan.copies);
    SourceState state = source.initial_state();
    for (std::uint64_t k = 0; k < plan.copies; ++k) {
        ConditionalRound round = source.conditional_round(std::move(state), rng);
        state = std::move(round.next);
        ++t.n1;
        if (round.record.win) ++t.q1;
        const bool lost = !round.record.win;
        t.rounds.push_back({true, round.success_prob, std::move(round.record)});
        if (plan.halt_on_first_failure && lost) {
            t.halted = true;
            break;
        }
    }
    t.success_rate = t.n1 ? static_cast<double>(t.q1) / static_cast<double>(t.n1) : 0.0;

    auto& v = run.verdict;
    v.q1 = t.q1;
    v.n1 = t.n1;
    v.success_rate = t.success_rate;
    if (t.halted) {
        v.note = "halted at the first lost round";
    } else if (t.n1 > 0 && t.q1 >= required_successes(plan.p1, t.n1)) {
        v.outcome = Outcome::success;
        Claim claim;
        claim.kind = ClaimKind::average_extractability;
        claim.extractability_floor = 1.0 - plan.eta;
        claim.confidence = 1.0 - plan.delta;
        v.claim = claim;
    } else {
        v.note = "success rate below threshold";
    }
    return run;
}

ProtocolRun run_certification(const CertificationPlan& plan, const RoundEngine& source, std::uint64_t seed) {
    if (!source.model().independent_copies()) {
        throw std::invalid_argument("certification needs a source with independent copies");
    }
    if (source.model().copies() < plan.copies) throw std::invalid_argument("source has fewer copies than the plan needs");
    if (!(plan.mu > 0.0 && plan.mu <= 1.0)) throw std::invalid_argument("mu must lie in (0, 1]");
    Rng rng(Rng::derive(seed, kRoundStream));
    Rng coins(Rng::derive(seed, kCoinStream));
    ProtocolRun run;
    auto& t = run.transcript;
    t.rounds.reserve(plan.copies);
    SourceState state = source.initial_state();
    for (std::uint64_t k = 0; k < plan.copies; ++k) {
        if (coins.bernoulli(plan.mu)) {
            ConditionalRound round = source.conditional_round(std::move(state), rng);
            state = std::move(round.next);
            ++t.n1;
            if (round.record.win) ++t.q1;
            t.rounds.push_back({true, round.success_prob, std::move(round.record)});
        } else {
            state = source.skip_round(std::move(state));
            t.rounds.push_back({false, 0.0, {}});
            t.certificate.push_back(k);
        }
    }
    t.success_rate = t.n1 ? static_cast<double>(t.q1) / static_cast<double>(t.n1) : 0.0;

    auto& v = run.verdict;
    v.q1 = t.q1;
    v.n1 = t.n1;
    v.success_rate = t.success_rate;
    if (t.n1 == 0) {
        v.note = "no rounds measured";
        return run;
    }
    if (t.q1 < required_successes(plan.p1, t.n1)) {
        v.note = "success rate below threshold";
        return run;
    }
    v.outcome = Outcome::success;
    Claim claim;
    claim.confidence = 1.0 - plan.delta;
    if (t.n1 == plan.copies) {
        claim.kind = ClaimKind::average_extractability;
        claim.extractability_floor = 1.0 - plan.eta;
        v.note = "every copy was measured; no certificate remains";
    } else {
        claim.kind = ClaimKind::certificate_extractability;
        const std::optional<double> mu = plan.mu < 1.0 ? std::optional<double>(plan.mu) : std::nullopt;
        const CertificateFloor floor =
            certificate_success_floor(plan.p2, plan.robustness.p_qm, plan.copies, t.n1, mu);
        const MappedValue exact =
            extractability_success_map(plan.robustness, MapDirection::success_to_extractability, floor.exact);
        claim.extractability_floor = exact.value;
        claim.clamped = exact.clamped;
        claim.certificate_success_floor = floor.exact;
        if (floor.approximate) {
            claim.approximate_success_floor = floor.approximate;
            claim.approximate_extractability_floor =
                extractability_success_map(plan.robustness, MapDirection::success_to_extractability, *floor.approximate)
                    .value;
        }
    }
    v.claim = claim;
    return run;
}

}  // namespace diqv
