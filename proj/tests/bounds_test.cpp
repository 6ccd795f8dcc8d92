#include "diqv/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace diqv;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kCStandard = 2.0 - kSqrt2;
const double kPChsh = (2.0 + kSqrt2) / 4.0;

}  // namespace

// Reference values below were computed once with mpmath at 50 digits.

TEST(KlDivergence, FrozenValues) {
    EXPECT_NEAR(kl_divergence(0.98, 0.95), 0.012142960691147362, 1e-15);
    EXPECT_NEAR(kl_divergence(1.0, 0.95), 0.0512932943875505, 1e-15);
    EXPECT_NEAR(kl_divergence(0.97, 1.0 - 0.1 * kCStandard), 0.0089329152306, 1e-12);
    EXPECT_EQ(kl_divergence(0.5, 0.5), 0.0);
}

TEST(KlDivergence, InfiniteAndInvalidCases) {
    EXPECT_EQ(kl_divergence(0.5, 1.0), std::numeric_limits<double>::infinity());
    EXPECT_EQ(kl_divergence(0.5, 0.0), std::numeric_limits<double>::infinity());
    EXPECT_EQ(kl_divergence(1.0, 1.0), 0.0);
    EXPECT_EQ(kl_divergence(0.0, 0.0), 0.0);
    EXPECT_THROW(kl_divergence(1.1, 0.5), std::invalid_argument);
    EXPECT_THROW(kl_divergence(0.5, -0.1), std::invalid_argument);
    EXPECT_THROW(kl_divergence(std::nan(""), 0.5), std::invalid_argument);
}

TEST(KlDivergence, PinskerAndMonotonicity) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(gen), b = u(gen);
        const double d = kl_divergence(a, b);
        EXPECT_GE(d, 2.0 * (a - b) * (a - b) - 1e-15);
        // Moving b further from a increases the divergence.
        const double b_far = a > b ? b * 0.9 : b + 0.1 * (1.0 - b);
        EXPECT_GE(kl_divergence(a, b_far), d - 1e-15);
    }
}

TEST(TailBounds, ValuesAndDomain) {
    EXPECT_NEAR(verification_tail_bound(0.98, 0.95, 380), std::exp(-0.012142960691147362 * 380), 1e-14);
    EXPECT_NEAR(certification_tail_bound(0.5, 0.98, 0.95, 100), 0.545908, 1e-6);
    EXPECT_NEAR(certification_tail_bound(0.5, 0.98, 0.95, 762), 0.0099277, 1e-7);
    EXPECT_EQ(verification_tail_bound(0.98, 0.95, 0), 1.0);
    EXPECT_THROW(verification_tail_bound(0.95, 0.98, 10), std::invalid_argument);
    EXPECT_THROW(certification_tail_bound(0.0, 0.98, 0.95, 10), std::invalid_argument);
    EXPECT_THROW(certification_tail_bound(1.5, 0.98, 0.95, 10), std::invalid_argument);
}

TEST(TailBounds, CertificationWithMuOneIsVerification) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 500; ++i) {
        double p1 = u(gen), p2 = u(gen);
        if (p2 > p1) std::swap(p1, p2);
        if (p1 == p2) continue;
        const std::uint64_t n = 1 + gen() % 500;
        EXPECT_NEAR(certification_tail_bound(1.0, p1, p2, n), verification_tail_bound(p1, p2, n), 1e-13);
    }
}

TEST(Planners, FrozenSampleSizes) {
    EXPECT_EQ(verification_sample_size(1.0, 0.02, 0.05, 0.01), 380u);
    EXPECT_EQ(verification_sample_size(1.0, 0.03, 0.1 * kCStandard, 0.01), 516u);
    EXPECT_EQ(certification_sample_size(0.5, 1.0, 0.02, 0.05, 0.01), 761u);
    EXPECT_EQ(certification_sample_size(0.5, 1.0, 0.03, 0.2 * kCStandard * 0.5, 0.01), 1034u);
    EXPECT_EQ(allpass_sample_size(kCStandard / 4.0, 0.1, 1e-4), 625u);
    EXPECT_EQ(dd_sample_size(1.0 / 3.0, 0.1, 1e-4), 272u);
}

TEST(Planners, AllPassAndDeviceDependentClosedForms) {
    EXPECT_EQ(allpass_sample_size(1.0, 0.06, 0.01), 75u);
    EXPECT_EQ(dd_sample_size(1.0, 0.1, 0.01), 44u);
    EXPECT_EQ(verification_sample_size(1.0, 0.0, 0.06, 0.01), allpass_sample_size(1.0, 0.06, 0.01));
}

TEST(Planners, ReturnMinimalSizes) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 400; ++i) {
        const double p_qm = u(gen) < 0.5 ? 1.0 : 0.7 + 0.29 * u(gen);
        const double eps2 = 0.01 + 0.1 * u(gen);
        const double eps1 = eps2 * 0.9 * u(gen);
        const double delta = std::pow(10.0, -1.0 - 5.0 * u(gen));
        const double mu = 0.05 + 0.95 * u(gen);
        const double p1 = p_qm - eps1, p2 = p_qm - eps2;
        const auto nv = verification_sample_size(p_qm, eps1, eps2, delta);
        EXPECT_LE(verification_tail_bound(p1, p2, nv), delta);
        EXPECT_GT(verification_tail_bound(p1, p2, nv - 1), delta);
        const auto nc = certification_sample_size(mu, p_qm, eps1, eps2, delta);
        EXPECT_LE(certification_tail_bound(mu, p1, p2, nc), delta);
        EXPECT_GT(certification_tail_bound(mu, p1, p2, nc - 1), delta);
        EXPECT_GE(nc, nv);
    }
}

TEST(Planners, Validation) {
    EXPECT_THROW(verification_sample_size(1.0, 0.05, 0.05, 0.01), std::invalid_argument);
    EXPECT_THROW(verification_sample_size(1.0, 0.06, 0.05, 0.01), std::invalid_argument);
    EXPECT_THROW(verification_sample_size(1.0, 0.01, 0.05, 0.0), std::invalid_argument);
    EXPECT_THROW(verification_sample_size(1.0, -0.01, 0.05, 0.01), std::invalid_argument);
    EXPECT_THROW(verification_sample_size(0.5, 0.01, 0.5, 0.01), std::invalid_argument);
    EXPECT_THROW(certification_sample_size(0.0, 1.0, 0.01, 0.05, 0.01), std::invalid_argument);
    EXPECT_EQ(verification_sample_size(1.0, 0.01, 0.05, 1.0), 0u);
}

TEST(Appendix, OptimalTMatchesGridSearch) {
    EXPECT_NEAR(optimal_t(0.98, 0.95), 0.947381318944186, 1e-12);
    EXPECT_EQ(optimal_t(1.0, 0.9), std::numeric_limits<double>::infinity());
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        double p1 = u(gen), p2 = u(gen);
        if (p2 > p1) std::swap(p1, p2);
        const double mu = u(gen);
        const double t_star = optimal_t(p1, p2);
        double lo = 0.0, hi = 4.0 * t_star + 1.0;
        // Golden-section search on the convex raw bound.
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 200; ++it) {
            const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
            if (mgf_bound_raw(a, mu, p1, p2) < mgf_bound_raw(b, mu, p1, p2)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        EXPECT_NEAR(0.5 * (lo + hi), t_star, 1e-6 * std::max(1.0, t_star));
        EXPECT_NEAR(mgf_bound_raw(t_star, mu, p1, p2), 1.0 - mu + mu * std::exp(-kl_divergence(p1, p2)), 1e-12);
    }
}

TEST(Appendix, InfiniteTLimitWhenAllRoundsMustPass) {
    EXPECT_NEAR(mgf_bound_raw(std::numeric_limits<double>::infinity(), 0.5, 1.0, 0.95), 1.0 - 0.5 + 0.5 * 0.95, 1e-15);
}

TEST(Taylor, LeadingOrderSizesApproachKnownConstantMultiples) {
    // At fixed r = eps1/eps2 the leading-order expansion omits a term of the
    // same order as the one it keeps, so exact/Taylor tends to a constant set
    // by r rather than to 1. For r = 0.4 that constant is
    // 1/(1.4 (0.6 + 0.4 ln 0.4)) in the algebraic regime and 1/(0.36 * 1.8) in
    // the nonalgebraic one.
    const double r = 0.4;
    const double algebraic_limit = 1.0 / ((1.0 + r) * ((1.0 - r) + r * std::log(r)));
    const double nonalgebraic_limit = 1.0 / ((1.0 - r) * (1.0 - r) * (1.0 + 2.0 * r));
    const double eps2 = 1e-4, delta = 1e-6;
    for (double mu : {1.0, 0.5}) {
        const auto protocol = mu == 1.0 ? Protocol::verification : Protocol::certification;
        const double exact_alg = mu == 1.0 ? static_cast<double>(verification_sample_size(1.0, r * eps2, eps2, delta))
                                           : static_cast<double>(certification_sample_size(mu, 1.0, r * eps2, eps2, delta));
        const double taylor_alg =
            static_cast<double>(taylor_sample_size(protocol, Regime::algebraic, 1.0, r * eps2, eps2, delta, mu));
        EXPECT_NEAR(exact_alg / taylor_alg, algebraic_limit, 0.01 * algebraic_limit);
        const double exact_non =
            mu == 1.0 ? static_cast<double>(verification_sample_size(kPChsh, r * eps2, eps2, delta))
                      : static_cast<double>(certification_sample_size(mu, kPChsh, r * eps2, eps2, delta));
        const double taylor_non =
            static_cast<double>(taylor_sample_size(protocol, Regime::nonalgebraic, kPChsh, r * eps2, eps2, delta, mu));
        EXPECT_NEAR(exact_non / taylor_non, nonalgebraic_limit, 0.01 * nonalgebraic_limit);
    }
}

TEST(Taylor, ExactAtZeroSlackInTheNonalgebraicLimit) {
    const double eps2 = 1e-4, delta = 1e-6;
    const double exact = static_cast<double>(verification_sample_size(kPChsh, 0.0, eps2, delta));
    const double taylor =
        static_cast<double>(taylor_sample_size(Protocol::verification, Regime::nonalgebraic, kPChsh, 0.0, eps2, delta));
    EXPECT_NEAR(exact / taylor, 1.0, 0.01);
}

TEST(Certificate, FloorFormsAgreeWhenNOneIsMuN) {
    const auto f = certificate_success_floor(0.95, 1.0, 1000, 500, 0.5);
    EXPECT_NEAR(f.exact, (1000 * 0.95 - 500) / 500.0, 1e-12);
    ASSERT_TRUE(f.approximate.has_value());
    EXPECT_NEAR(*f.approximate, 1.0 - 0.05 / 0.5, 1e-12);
    EXPECT_NEAR(f.exact, *f.approximate, 1e-12);
    EXPECT_FALSE(certificate_success_floor(0.95, 1.0, 1000, 500).approximate.has_value());
    EXPECT_THROW(certificate_success_floor(0.95, 1.0, 10, 10), std::invalid_argument);
}

TEST(ExtractabilityMap, InvertsAndClamps) {
    RobustnessModel m;
    m.p_qm = 1.0;
    m.c = kCStandard;
    m.b_q = 4.0;
    m.algebraic = true;
    const double p = extractability_success_map(m, MapDirection::deficit_to_success, 0.1).value;
    EXPECT_NEAR(p, 1.0 - 0.1 * kCStandard, 1e-15);
    EXPECT_NEAR(extractability_success_map(m, MapDirection::success_to_deficit, p).value, 0.1, 1e-14);
    EXPECT_NEAR(extractability_success_map(m, MapDirection::success_to_extractability, 0.95).value,
                1.0 - 0.05 / kCStandard, 1e-14);
    const auto clamped = extractability_success_map(m, MapDirection::success_to_extractability, 0.0);
    EXPECT_TRUE(clamped.clamped);
    EXPECT_EQ(clamped.value, 0.0);
}

TEST(Report, CarriesPlannerAndTaylorSizes) {
    const auto r = bound_report(Protocol::verification, 1.0, 0.03, 0.1 * kCStandard, 0.01);
    EXPECT_EQ(r.sample_size, 516u);
    EXPECT_EQ(r.regime, Regime::algebraic);
    EXPECT_LE(r.tail_bound, 0.01);
    EXPECT_NEAR(r.optimal_t, optimal_t(0.97, 1.0 - 0.1 * kCStandard), 1e-15);
    EXPECT_EQ(bound_report(Protocol::verification, 1.0, 0.0, 0.05, 0.01).optimal_t,
              std::numeric_limits<double>::infinity());
    EXPECT_GT(r.taylor_size, 0u);
    const auto c = bound_report(Protocol::certification, kPChsh, 0.0, 0.02, 0.01, 0.5);
    EXPECT_EQ(c.regime, Regime::nonalgebraic);
    ASSERT_TRUE(c.mu.has_value());
    EXPECT_THROW(bound_report(Protocol::certification, kPChsh, 0.0, 0.02, 0.01), std::invalid_argument);
}
