#pragma once

// Verification (every copy measured, claim about the measured sequence) and
// certification (a mu-biased coin picks the measured copies, claim about the
// rest) as sequential state machines over a RoundEngine.

#include "diqv/bounds.hpp"
#include "diqv/games.hpp"
#include "diqv/sources.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diqv {

struct VerificationPlan {
    std::string game;
    RobustnessModel robustness;
    double eta = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;  ///< c * eta
    double delta = 0.0;
    std::uint64_t copies = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    /// Stop at the first lost round (all-pass mode, p_QM = 1 only).
    bool halt_on_first_failure = false;
};

struct CertificationPlan {
    std::string game;
    RobustnessModel robustness;
    double eta_c = 0.0;
    double mu = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;  ///< c * eta_c * (1 - mu)
    double delta = 0.0;
    std::uint64_t copies = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    /// eps2 / c, the whole-sample deficit implied by eta_c.
    double eta = 0.0;
};

VerificationPlan plan_verification(const GameDefinition& game, double eta, double eps1, double delta);
/// Same with an explicit robustness model (e.g. a user-supplied c).
VerificationPlan plan_verification(const NonlocalGame& game, const RobustnessModel& robustness, double eta,
                                   double eps1, double delta);

/// All rounds must pass: p1 = 1, N from the all-pass planner, halts on the
/// first loss. Requires an algebraic game.
VerificationPlan plan_allpass_verification(const NonlocalGame& game, const RobustnessModel& robustness, double eta,
                                           double delta);

CertificationPlan plan_certification(const NonlocalGame& game, const RobustnessModel& robustness, double eta_c,
                                     double mu, double eps1, double delta);

struct TranscriptRound {
    bool measured = false;
    /// Conditional success probability of the round (measured rounds only).
    double success_prob = 0.0;
    RoundRecord record;
};

struct Transcript {
    std::vector<TranscriptRound> rounds;
    std::uint64_t n1 = 0;
    std::uint64_t q1 = 0;
    /// q1 / n1, or 0 when nothing was measured.
    double success_rate = 0.0;
    /// Indices of the unmeasured (certificate) copies.
    std::vector<std::uint64_t> certificate;
    bool halted = false;
};

enum class Outcome { success, inconclusive };
enum class ClaimKind { average_extractability, certificate_extractability };

struct Claim {
    ClaimKind kind = ClaimKind::average_extractability;
    /// Lower bound on the (certificate's) average extractability.
    double extractability_floor = 0.0;
    double confidence = 0.0;
    /// Certification only: success-probability floor of the certificate with
    /// the realized N1, its mu approximation, and the approximation's
    /// extractability floor.
    std::optional<double> certificate_success_floor;
    std::optional<double> approximate_success_floor;
    std::optional<double> approximate_extractability_floor;
    bool clamped = false;
};

struct Verdict {
    Outcome outcome = Outcome::inconclusive;
    std::optional<Claim> claim;
    double success_rate = 0.0;
    std::uint64_t q1 = 0;
    std::uint64_t n1 = 0;
    std::string note;
};

struct ProtocolRun {
    Transcript transcript;
    Verdict verdict;
};

/// Smallest integer k with k >= p1 * n. Products within 1e-9 of an integer
/// are snapped to it, so q/n >= p1 is decided without float drift and a
/// rate exactly equal to p1 passes.
std::uint64_t required_successes(double p1, std::uint64_t n);

/// Measures the first plan.copies copies in order. Deterministic per seed.
ProtocolRun run_verification(const VerificationPlan& plan, const RoundEngine& source, std::uint64_t seed);

/// Per-copy mu-biased coin; independent-copy sources only (a mixture source
/// throws std::invalid_argument). Coins come from their own stream so a
/// forced mu = 1 reproduces run_verification on the same seed.
ProtocolRun run_certification(const CertificationPlan& plan, const RoundEngine& source, std::uint64_t seed);

std::string to_string(Outcome o);

}  // namespace diqv
