#pragma once

// Exact pass probabilities for independent rounds, a seeded Monte Carlo
// harness, and the datasets behind the verification/certification figures.

#include "diqv/protocols.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace diqv {

struct OracleResult {
    double exact_probability = 0.0;
    double bound = 0.0;
    /// bound - exact; never below -1e-12 when the bound is valid.
    double slack = 0.0;
};

/// Pr[sum o_k >= required_successes(p1, N)] for independent Bernoulli(p_k),
/// by Poisson-binomial convolution. N <= 5000.
double exact_pass_probability(std::span<const double> success_probs, double p1);

/// Two-stage process: copy k is measured with probability mu and then wins
/// with probability p_k. Returns Pr[N1 > 0 and q1 >= required_successes(p1, N1)];
/// the all-unmeasured outcome (mass (1-mu)^N) counts as a failure. N <= 300.
double exact_certification_pass_probability(std::span<const double> success_probs, double mu, double p1);

/// Exact probability of the event versus the Chernoff-type bound with
/// p2 = mean(success_probs).
OracleResult verification_oracle(std::span<const double> success_probs, double p1);
OracleResult certification_oracle(std::span<const double> success_probs, double mu, double p1);

struct PassEstimate {
    double rate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t passes = 0;
    std::uint64_t trials = 0;
};

/// Fraction of successful runs. Trial i uses seed Rng::derive(master_seed, i);
/// the result is identical for any worker count.
PassEstimate mc_pass_estimate(const VerificationPlan& plan, const RoundEngine& source, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned workers = 1);
PassEstimate mc_pass_estimate(const CertificationPlan& plan, const RoundEngine& source, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned workers = 1);

enum class FigureId { fig2a, fig2b, fig3 };

std::string to_string(FigureId id);
FigureId figure_id_from_string(const std::string& name);

struct FigureSpec {
    FigureId figure = FigureId::fig2a;
    /// eta values (fig2a, fig2b) or eta_c values (fig3).
    std::vector<double> etas;
    std::uint64_t n_min = 0;
    std::uint64_t n_max = 0;
    std::uint64_t n_step = 1;
    double mu = 0.5;
    double p1 = 0.95;
    double c = 0.0;
    double nu = 1.0 / 3.0;
    double delta = 1e-4;
    std::filesystem::path output_dir = ".";

    void validate() const;
};

/// Defaults reconstructing each figure: fig2a with c = (2-sqrt2)/4 and
/// nu = 1/3; fig2b with p1 = 0.95 and c = 2-sqrt2; fig3 with mu = 1/2,
/// p1 = 0.98 and c = 2-sqrt2.
FigureSpec default_figure_spec(FigureId id);

struct Dataset {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Comma-separated, header first, values printed with %.12g.
    std::string to_csv() const;
};

Dataset figure_dataset(const FigureSpec& spec);

/// Writes <id>.csv and the <id>.json sidecar holding the spec; returns the CSV path.
std::filesystem::path write_figure(const FigureSpec& spec);

}  // namespace diqv
