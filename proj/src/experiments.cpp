#include "diqv/experiments.hpp"

#include "diqv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace diqv {

double exact_pass_probability(std::span<const double> success_probs, double p1) {
    if (success_probs.empty()) throw std::invalid_argument("empty success-probability list");
    if (success_probs.size() > 5000) throw std::invalid_argument("exact oracle supports at most 5000 rounds");
    const std::size_t n = success_probs.size();
    // dist[q] = Pr[q successes so far]
    std::vector<double> dist(n + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = success_probs[k];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("success probabilities must lie in [0, 1]");
        for (std::size_t q = k + 1; q > 0; --q) dist[q] = dist[q] * (1.0 - p) + dist[q - 1] * p;
        dist[0] *= 1.0 - p;
    }
    const std::uint64_t threshold = required_successes(p1, n);
    double pass = 0.0;
    for (std::size_t q = threshold; q <= n; ++q) pass += dist[q];
    return std::clamp(pass, 0.0, 1.0);
}

double exact_certification_pass_probability(std::span<const double> success_probs, double mu, double p1) {
    if (success_probs.empty()) throw std::invalid_argument("empty success-probability list");
    if (success_probs.size() > 300) throw std::invalid_argument("two-stage oracle supports at most 300 rounds");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
    const std::size_t n = success_probs.size();
    const std::size_t w = n + 1;
    // dist[n1 * w + q] = Pr[n1 measured, q of them won]
    std::vector<double> dist(w * w, 0.0);
    dist[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = success_probs[k];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("success probabilities must lie in [0, 1]");
        const double win = mu * p;
        const double lose = mu * (1.0 - p);
        for (std::size_t n1 = k + 1; n1-- > 0;) {
            for (std::size_t q = n1 + 1; q-- > 0;) {
                const double mass = dist[n1 * w + q];
                if (mass == 0.0) continue;
                dist[n1 * w + q] = mass * (1.0 - mu);
                dist[(n1 + 1) * w + q + 1] += mass * win;
                dist[(n1 + 1) * w + q] += mass * lose;
            }
        }
    }
    double pass = 0.0;
    for (std::size_t n1 = 1; n1 <= n; ++n1) {
        for (std::size_t q = required_successes(p1, n1); q <= n1; ++q) pass += dist[n1 * w + q];
    }
    return std::clamp(pass, 0.0, 1.0);
}

namespace {

double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

OracleResult make_oracle(double exact, double bound) { return {exact, bound, bound - exact}; }

template <typename Plan, typename Runner>
PassEstimate run_trials(const Plan& plan, const RoundEngine& source, std::uint64_t trials, std::uint64_t master_seed,
                        unsigned workers, Runner runner) {
    if (trials == 0) throw std::invalid_argument("at least one trial is required");
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(trials, 1024))));
    std::vector<std::uint64_t> passes(workers, 0);
    auto work = [&](unsigned id) {
        for (std::uint64_t i = id; i < trials; i += workers) {
            if (runner(plan, source, Rng::derive(master_seed, i)).verdict.outcome == Outcome::success) ++passes[id];
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
    }
    PassEstimate est;
    est.trials = trials;
    est.passes = std::accumulate(passes.begin(), passes.end(), std::uint64_t{0});
    const double t = static_cast<double>(trials);
    est.rate = static_cast<double>(est.passes) / t;
    est.stderr_ = std::sqrt(est.rate * (1.0 - est.rate) / t);
    return est;
}

}  // namespace

OracleResult verification_oracle(std::span<const double> success_probs, double p1) {
    const double p2 = mean(success_probs);
    return make_oracle(exact_pass_probability(success_probs, p1),
                       verification_tail_bound(p1, p2, success_probs.size()));
}

OracleResult certification_oracle(std::span<const double> success_probs, double mu, double p1) {
    const double p2 = mean(success_probs);
    return make_oracle(exact_certification_pass_probability(success_probs, mu, p1),
                       certification_tail_bound(mu, p1, p2, success_probs.size()));
}

PassEstimate mc_pass_estimate(const VerificationPlan& plan, const RoundEngine& source, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned workers) {
    return run_trials(plan, source, trials, master_seed, workers,
                      [](const VerificationPlan& p, const RoundEngine& s, std::uint64_t seed) {
                          return run_verification(p, s, seed);
                      });
}

PassEstimate mc_pass_estimate(const CertificationPlan& plan, const RoundEngine& source, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned workers) {
    return run_trials(plan, source, trials, master_seed, workers,
                      [](const CertificationPlan& p, const RoundEngine& s, std::uint64_t seed) {
                          return run_certification(p, s, seed);
                      });
}

std::string to_string(FigureId id) {
    switch (id) {
        case FigureId::fig2a: return "fig2a";
        case FigureId::fig2b: return "fig2b";
        case FigureId::fig3: return "fig3";
    }
    return "unknown";
}

FigureId figure_id_from_string(const std::string& name) {
    if (name == "fig2a") return FigureId::fig2a;
    if (name == "fig2b") return FigureId::fig2b;
    if (name == "fig3") return FigureId::fig3;
    throw std::invalid_argument("unknown figure '" + name + "'");
}

void FigureSpec::validate() const {
    if (etas.empty()) throw std::invalid_argument("figure needs at least one eta value");
    if (!(c > 0.0)) throw std::invalid_argument("figure needs a positive robustness constant");
    if (figure == FigureId::fig2a) {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
        for (double eta : etas) {
            if (!(c * eta > 0.0 && c * eta < 1.0 && eta * nu > 0.0 && eta * nu < 1.0)) {
                throw std::invalid_argument("eta outside the planners' range");
            }
        }
        return;
    }
    if (n_step == 0 || n_min > n_max) throw std::invalid_argument("invalid N range");
    if (!(p1 > 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 must lie in (0, 1]");
    for (double eta : etas) {
        const double eps2 = figure == FigureId::fig2b ? c * eta : c * eta * (1.0 - mu);
        const double p2 = 1.0 - eps2;
        if (!(p2 > 0.0 && p2 < p1)) throw std::invalid_argument("eta gives p2 outside (0, p1)");
    }
    if (figure == FigureId::fig3 && !(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
}

FigureSpec default_figure_spec(FigureId id) {
    FigureSpec spec;
    spec.figure = id;
    const double c_standard = 2.0 - std::sqrt(2.0);
    switch (id) {
        case FigureId::fig2a:
            spec.etas = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
            spec.c = c_standard / 4.0;
            spec.nu = 1.0 / 3.0;
            spec.delta = 1e-4;
            break;
        case FigureId::fig2b:
            spec.etas = {0.1, 0.12, 0.15, 0.2};
            spec.c = c_standard;
            spec.p1 = 0.95;
            spec.n_min = 100;
            spec.n_max = 10000;
            spec.n_step = 100;
            break;
        case FigureId::fig3:
            spec.etas = {0.1, 0.15, 0.2, 0.3};
            spec.c = c_standard;
            spec.p1 = 0.98;
            spec.mu = 0.5;
            spec.n_min = 100;
            spec.n_max = 10000;
            spec.n_step = 100;
            break;
    }
    return spec;
}

std::string Dataset::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.12g", row[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Dataset figure_dataset(const FigureSpec& spec) {
    spec.validate();
    Dataset data;
    switch (spec.figure) {
        case FigureId::fig2a:
            data.header = {"eta", "N_DI", "N_DD", "ratio"};
            for (double eta : spec.etas) {
                const auto n_di = static_cast<double>(allpass_sample_size(spec.c, eta, spec.delta));
                const auto n_dd = static_cast<double>(dd_sample_size(spec.nu, eta, spec.delta));
                data.rows.push_back({eta, n_di, n_dd, n_di / n_dd});
            }
            break;
        case FigureId::fig2b:
            data.header = {"N", "eta", "confidence"};
            for (double eta : spec.etas) {
                const double p2 = 1.0 - spec.c * eta;
                for (std::uint64_t n = spec.n_min; n <= spec.n_max; n += spec.n_step) {
                    data.rows.push_back({static_cast<double>(n), eta, 1.0 - verification_tail_bound(spec.p1, p2, n)});
                }
            }
            break;
        case FigureId::fig3:
            data.header = {"N", "eta_c", "confidence"};
            for (double eta_c : spec.etas) {
                const double p2 = 1.0 - spec.c * eta_c * (1.0 - spec.mu);
                for (std::uint64_t n = spec.n_min; n <= spec.n_max; n += spec.n_step) {
                    data.rows.push_back(
                        {static_cast<double>(n), eta_c, 1.0 - certification_tail_bound(spec.mu, spec.p1, p2, n)});
                }
            }
            break;
    }
    return data;
}

std::filesystem::path write_figure(const FigureSpec& spec) {
    const Dataset data = figure_dataset(spec);
    std::filesystem::create_directories(spec.output_dir);
    const std::string stem = to_string(spec.figure);
    const auto csv_path = spec.output_dir / (stem + ".csv");
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        csv << data.to_csv();
    }
    std::ofstream sidecar(spec.output_dir / (stem + ".json"), std::ios::binary);
    if (!sidecar) throw std::runtime_error("cannot write figure sidecar");
    sidecar << to_json(spec).dump(2) << '\n';
    return csv_path;
}

}  // namespace diqv
