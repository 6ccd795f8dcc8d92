#include "diqv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diqv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
}

void require_mu(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive: nothing is measured");
    if (!(mu <= 1.0)) throw std::invalid_argument("mu must not exceed 1");
}

void require_separated(double p1, double p2) {
    require_probability(p1, "p1");
    require_probability(p2, "p2");
    if (!(p2 < p1)) throw std::invalid_argument("bound is vacuous unless p2 < p1");
}

/// -ln of the per-copy certification factor, ln(1 - mu + mu e^{-D}).
double certification_rate(double mu, double kl) {
    if (std::isinf(kl)) return -std::log1p(-mu);
    return -std::log1p(mu * std::expm1(-kl));
}

double tail_from_rate(double rate, std::uint64_t n) {
    if (n == 0) return 1.0;
    if (std::isinf(rate)) return 0.0;
    return std::clamp(std::exp(-rate * static_cast<double>(n)), 0.0, 1.0);
}

/// Smallest n with exp(-rate n) <= delta, checked against the same
/// evaluation the tail-bound functions use.
std::uint64_t minimal_size(double rate, double delta) {
    if (delta >= 1.0) return 0;
    if (!(rate > 0.0)) throw std::invalid_argument("indistinguishable hypotheses: zero exponent");
    const double estimate = std::log(1.0 / delta) / rate;
    if (!(estimate < 1e15)) throw std::overflow_error("sample size exceeds the supported range");
    auto n = static_cast<std::uint64_t>(std::ceil(estimate));
    while (tail_from_rate(rate, n) > delta) ++n;
    while (n > 0 && tail_from_rate(rate, n - 1) <= delta) --n;
    return n;
}

void check_epsilons(double p_qm, double eps1, double eps2) {
    if (!(p_qm > 0.0 && p_qm <= 1.0)) throw std::invalid_argument("p_QM must lie in (0, 1]");
    if (!(eps1 >= 0.0)) throw std::invalid_argument("eps1 must be non-negative");
    if (!(eps1 < eps2)) throw std::invalid_argument("indistinguishable hypotheses: eps1 must be below eps2");
    if (!(p_qm - eps2 > 0.0)) throw std::invalid_argument("p_QM - eps2 must stay positive");
}

}  // namespace

double kl_divergence(double a, double b) {
    require_probability(a, "a");
    require_probability(b, "b");
    if (a == b) return 0.0;
    double d = 0.0;
    if (a > 0.0) {
        if (b == 0.0) return kInf;
        d += a * std::log1p((a - b) / b);
    }
    if (a < 1.0) {
        if (b == 1.0) return kInf;
        d += (1.0 - a) * std::log1p((b - a) / (1.0 - b));
    }
    return std::max(0.0, d);
}

double verification_tail_bound(double p1, double p2, std::uint64_t n) {
    require_separated(p1, p2);
    return tail_from_rate(kl_divergence(p1, p2), n);
}

double certification_tail_bound(double mu, double p1, double p2, std::uint64_t n) {
    require_mu(mu);
    require_separated(p1, p2);
    const double kl = kl_divergence(p1, p2);
    if (mu == 1.0) return tail_from_rate(kl, n);
    return tail_from_rate(certification_rate(mu, kl), n);
}

std::uint64_t verification_sample_size(double p_qm, double eps1, double eps2, double delta) {
    check_epsilons(p_qm, eps1, eps2);
    require_delta(delta);
    return minimal_size(kl_divergence(p_qm - eps1, p_qm - eps2), delta);
}

std::uint64_t certification_sample_size(double mu, double p_qm, double eps1, double eps2, double delta) {
    require_mu(mu);
    check_epsilons(p_qm, eps1, eps2);
    require_delta(delta);
    const double kl = kl_divergence(p_qm - eps1, p_qm - eps2);
    return minimal_size(mu == 1.0 ? kl : certification_rate(mu, kl), delta);
}

std::uint64_t allpass_sample_size(double c, double eta, double delta) {
    const double x = c * eta;
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("c * eta must lie in (0, 1)");
    require_delta(delta);
    return minimal_size(-std::log1p(-x), delta);
}

std::uint64_t dd_sample_size(double nu, double eta, double delta) {
    const double x = eta * nu;
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("eta * nu must lie in (0, 1)");
    require_delta(delta);
    return minimal_size(-std::log1p(-x), delta);
}

CertificateFloor certificate_success_floor(double p2, double p_qm, std::uint64_t n, std::uint64_t n1,
                                           std::optional<double> mu) {
    if (n1 >= n) throw std::invalid_argument("no certificate remains: N1 must be below N");
    CertificateFloor floor;
    const double nn = static_cast<double>(n);
    const double nn1 = static_cast<double>(n1);
    floor.exact = (nn * p2 - nn1 * p_qm) / (nn - nn1);
    if (mu) {
        if (!(*mu >= 0.0 && *mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1) for the approximate floor");
        floor.approximate = p_qm - (p_qm - p2) / (1.0 - *mu);
    }
    return floor;
}

MappedValue extractability_success_map(const RobustnessModel& model, MapDirection direction, double value) {
    const double c = model.require_c();
    double raw = 0.0;
    switch (direction) {
        case MapDirection::deficit_to_success: raw = model.p_qm - c * value; break;
        case MapDirection::success_to_deficit: raw = (model.p_qm - value) / c; break;
        case MapDirection::success_to_extractability: {
            const MappedValue deficit = extractability_success_map(model, MapDirection::success_to_deficit, value);
            return {1.0 - deficit.value, deficit.clamped};
        }
    }
    const double clamped = std::clamp(raw, 0.0, 1.0);
    return {clamped, clamped != raw};
}

double mgf_bound_raw(double t, double mu, double p1, double p2) {
    if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
    require_probability(mu, "mu");
    require_probability(p1, "p1");
    require_probability(p2, "p2");
    if (std::isinf(t)) {
        if (p1 < 1.0) return kInf;
        return 1.0 - mu + mu * p2;
    }
    const double down = std::exp(-p1 * t);
    const double up = std::exp((1.0 - p1) * t);
    return 1.0 - mu + mu * down + mu * p2 * (up - down);
}

double optimal_t(double p1, double p2) {
    if (!(p2 > 0.0 && p2 < 1.0)) throw std::invalid_argument("p2 must lie in (0, 1)");
    require_separated(p1, p2);
    if (p1 == 1.0) return kInf;
    return std::log((p1 * (1.0 - p2)) / ((1.0 - p1) * p2));
}

std::string to_string(Protocol p) { return p == Protocol::verification ? "verification" : "certification"; }
std::string to_string(Regime r) { return r == Regime::algebraic ? "algebraic" : "nonalgebraic"; }

std::uint64_t taylor_sample_size(Protocol protocol, Regime regime, double p_qm, double eps1, double eps2,
                                 double delta, double mu) {
    check_epsilons(p_qm, eps1, eps2);
    require_delta(delta);
    require_mu(mu);
    const double log_inv_delta = std::log(1.0 / delta);
    const double ratio = eps1 / eps2;
    double n = 0.0;
    if (regime == Regime::algebraic) {
        n = log_inv_delta / eps2 * (1.0 + ratio);
    } else {
        n = 2.0 * (1.0 - p_qm) * p_qm * log_inv_delta / (eps2 * eps2) * (1.0 + 2.0 * ratio);
    }
    if (protocol == Protocol::certification) n /= mu;
    return static_cast<std::uint64_t>(std::ceil(n));
}

BoundReport bound_report(Protocol protocol, double p_qm, double eps1, double eps2, double delta,
                         std::optional<double> mu) {
    check_epsilons(p_qm, eps1, eps2);
    BoundReport report;
    report.protocol = protocol;
    report.regime = std::abs(p_qm - 1.0) <= 1e-12 ? Regime::algebraic : Regime::nonalgebraic;
    report.p1 = p_qm - eps1;
    report.p2 = p_qm - eps2;
    report.kl = kl_divergence(report.p1, report.p2);
    report.optimal_t = optimal_t(report.p1, report.p2);
    if (protocol == Protocol::verification) {
        report.sample_size = verification_sample_size(p_qm, eps1, eps2, delta);
        report.tail_bound = verification_tail_bound(report.p1, report.p2, report.sample_size);
        report.taylor_size = taylor_sample_size(protocol, report.regime, p_qm, eps1, eps2, delta);
    } else {
        if (!mu) throw std::invalid_argument("certification report needs mu");
        report.mu = mu;
        report.sample_size = certification_sample_size(*mu, p_qm, eps1, eps2, delta);
        report.tail_bound = certification_tail_bound(*mu, report.p1, report.p2, report.sample_size);
        report.taylor_size = taylor_sample_size(protocol, report.regime, p_qm, eps1, eps2, delta, *mu);
    }
    return report;
}

}  // namespace diqv
