#pragma once

// Finite-sample tail bounds and sample-size planners for device-independent
// verification (all copies measured) and certification (each copy measured
// with probability mu). Natural logarithms throughout.

#include "diqv/games.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace diqv {

/// Binary relative entropy D(a||b) = a ln(a/b) + (1-a) ln((1-a)/(1-b)),
/// with 0 ln 0 = 0. Returns +infinity (never an overflowed float) when
/// b is 0 or 1 and a differs from it; std::invalid_argument outside [0,1].
double kl_divergence(double a, double b);

/// e^{-D(p1||p2) N}, clamped to [0, 1]. Requires p2 < p1.
double verification_tail_bound(double p1, double p2, std::uint64_t n);

/// [1 - mu + mu e^{-D(p1||p2)}]^N. Requires mu in (0, 1] and p2 < p1.
double certification_tail_bound(double mu, double p1, double p2, std::uint64_t n);

/// Smallest N with verification_tail_bound(p_qm - eps1, p_qm - eps2, N) <= delta.
/// delta = 1 gives 0.
std::uint64_t verification_sample_size(double p_qm, double eps1, double eps2, double delta);

/// Smallest N with certification_tail_bound(...) <= delta.
std::uint64_t certification_sample_size(double mu, double p_qm, double eps1, double eps2, double delta);

/// All-rounds-pass planner, N = ceil(ln delta / ln(1 - c eta)).
std::uint64_t allpass_sample_size(double c, double eta, double delta);

/// Device-dependent planner, N = ceil(ln delta / ln(1 - eta nu)).
std::uint64_t dd_sample_size(double nu, double eta, double delta);

struct CertificateFloor {
    /// (N p2 - N1 p_qm) / (N - N1)
    double exact = 0.0;
    /// p_qm - eps2 / (1 - mu)
    std::optional<double> approximate;
};

/// Lower bound on the unmeasured copies' average success probability.
/// Requires n1 < n; `mu` (when given) yields the approximate form.
CertificateFloor certificate_success_floor(double p2, double p_qm, std::uint64_t n, std::uint64_t n1,
                                           std::optional<double> mu = std::nullopt);

enum class MapDirection {
    deficit_to_success,     ///< eta -> p_qm - c eta
    success_to_deficit,     ///< p -> (p_qm - p) / c
    success_to_extractability,  ///< p -> 1 - (p_qm - p) / c
};

struct MappedValue {
    double value = 0.0;
    bool clamped = false;
};

/// Linear robustness map between extractability deficit and success
/// probability. The result is clamped to [0, 1] and flagged when it was.
MappedValue extractability_success_map(const RobustnessModel& model, MapDirection direction, double value);

/// f(t) = 1 - mu + mu e^{-p1 t} + mu p2 (e^{(1-p1) t} - e^{-p1 t}); at
/// t = +infinity returns the limit (finite only when p1 = 1).
double mgf_bound_raw(double t, double mu, double p1, double p2);

/// Minimizer ln[p1(1-p2) / ((1-p1) p2)]; +infinity when p1 = 1.
double optimal_t(double p1, double p2);

enum class Protocol { verification, certification };
enum class Regime { algebraic, nonalgebraic };

std::string to_string(Protocol p);
std::string to_string(Regime r);

/// Leading-order small-epsilon sample size (rounded up). Algebraic:
/// ln(1/delta)/eps2 (1 + eps1/eps2); nonalgebraic:
/// 2(1-p_qm)p_qm ln(1/delta)/eps2^2 (1 + 2 eps1/eps2); certification divides by mu.
std::uint64_t taylor_sample_size(Protocol protocol, Regime regime, double p_qm, double eps1, double eps2,
                                 double delta, double mu = 1.0);

struct BoundReport {
    double p1 = 0.0;
    double p2 = 0.0;
    double kl = 0.0;
    /// Tail bound evaluated at sample_size.
    double tail_bound = 0.0;
    double optimal_t = 0.0;
    std::uint64_t sample_size = 0;
    std::uint64_t taylor_size = 0;
    Regime regime = Regime::algebraic;
    Protocol protocol = Protocol::verification;
    std::optional<double> mu;
};

/// Full report for one protocol configuration. `mu` is required for
/// certification and ignored for verification.
BoundReport bound_report(Protocol protocol, double p_qm, double eps1, double eps2, double delta,
                         std::optional<double> mu = std::nullopt);

}  // namespace diqv
