#include "diqv/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace diqv {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<std::size_t> qubit_dims(std::size_t dim) {
    if (!is_power_of_two(dim)) {
        throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
    }
    std::vector<std::size_t> dims;
    for (std::size_t d = dim; d > 1; d >>= 1) dims.push_back(2);
    if (dims.empty()) dims.push_back(1);
    return dims;
}

std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_dims(std::size_t dim, std::span<const std::size_t> dims) {
    if (dims.empty() || product(dims) != dim) {
        throw std::invalid_argument("subsystem dimensions do not multiply to " + std::to_string(dim));
    }
}

void check_budget(std::size_t dim) {
    if (dim > kMaxDimension) {
        throw std::length_error("dimension " + std::to_string(dim) + " exceeds the 2^14 budget");
    }
}

void check_finite(const ComplexMatrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

}  // namespace

StateVector::StateVector(ComplexVector amplitudes)
    : StateVector(amplitudes, qubit_dims(static_cast<std::size_t>(amplitudes.size()))) {}

StateVector::StateVector(ComplexVector amplitudes, std::vector<std::size_t> dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    check_dims(dim(), dims_);
    check_budget(dim());
    if (!amplitudes_.allFinite()) throw std::invalid_argument("state has non-finite amplitudes");
    if (std::abs(amplitudes_.norm() - 1.0) > kTolerance) {
        throw std::invalid_argument("state vector is not normalized");
    }
}

ComplexMatrix StateVector::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

DensityOperator::DensityOperator(ComplexMatrix matrix, std::vector<std::size_t> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("density matrix must be square");
    check_dims(dim(), dims_);
    check_budget(dim());
    validate_density(matrix_);
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
    return DensityOperator(psi.projector(), psi.dims());
}

BinaryMeasurement::BinaryMeasurement(ComplexMatrix effect) : effect_(std::move(effect)) {
    if (effect_.rows() != effect_.cols()) throw std::invalid_argument("effect must be square");
    check_finite(effect_);
    if (!is_hermitian(effect_)) throw std::invalid_argument("effect is not Hermitian");
    const auto eig = hermitian_eigenvalues(effect_);
    if (eig.front() < -kTolerance || eig.back() > 1.0 + kTolerance) {
        throw std::invalid_argument("effect eigenvalues leave [0, 1]");
    }
}

ComplexMatrix BinaryMeasurement::complement() const {
    return ComplexMatrix::Identity(effect_.rows(), effect_.cols()) - effect_;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

void validate_density(const ComplexMatrix& m, double tol) {
    check_finite(m);
    if (!is_hermitian(m, tol)) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m.trace() - Complex(1.0, 0.0)) > tol) {
        throw std::invalid_argument("density matrix trace is not 1");
    }
    if (hermitian_eigenvalues(m).front() < -tol) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
    const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
    check_budget(std::max(rows, cols));
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors) {
    if (factors.empty()) throw std::invalid_argument("empty tensor product");
    ComplexMatrix out = factors.front();
    for (const auto& f : factors.subspan(1)) out = tensor_product(out, f);
    return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
    check_budget(static_cast<std::size_t>(a.size() * b.size()));
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    const auto dim = static_cast<std::size_t>(m.rows());
    if (m.rows() != m.cols()) throw std::invalid_argument("partial trace needs a square operator");
    check_dims(dim, dims);
    if (keep.empty()) throw std::invalid_argument("partial trace must keep at least one subsystem");

    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw std::out_of_range("subsystem index " + std::to_string(k) + " out of range");
        if (kept[k]) throw std::invalid_argument("duplicate subsystem index " + std::to_string(k));
        kept[k] = true;
    }

    std::size_t keep_dim = 1;
    std::size_t trace_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? keep_dim : trace_dim) *= dims[s];

    // full index -> (kept index, traced index), both most-significant-first.
    std::vector<std::size_t> rows_of(keep_dim * trace_dim);
    for (std::size_t full = 0; full < dim; ++full) {
        std::size_t rem = full;
        std::size_t k_idx = 0, t_idx = 0, k_stride = 1, t_stride = 1;
        for (std::size_t s = dims.size(); s-- > 0;) {
            const std::size_t digit = rem % dims[s];
            rem /= dims[s];
            if (kept[s]) {
                k_idx += digit * k_stride;
                k_stride *= dims[s];
            } else {
                t_idx += digit * t_stride;
                t_stride *= dims[s];
            }
        }
        rows_of[t_idx * keep_dim + k_idx] = full;
    }

    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(keep_dim),
                                            static_cast<Eigen::Index>(keep_dim));
    for (std::size_t t = 0; t < trace_dim; ++t) {
        const std::size_t* block = rows_of.data() + t * keep_dim;
        for (std::size_t r = 0; r < keep_dim; ++r) {
            for (std::size_t c = 0; c < keep_dim; ++c) {
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
                    m(static_cast<Eigen::Index>(block[r]), static_cast<Eigen::Index>(block[c]));
            }
        }
    }
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
    ComplexMatrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
    std::vector<std::size_t> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> dims;
    for (std::size_t k : sorted) dims.push_back(rho.dims()[k]);
    return DensityOperator(std::move(reduced), std::move(dims));
}

double fidelity_with_pure(const DensityOperator& rho, const StateVector& psi) {
    if (rho.dim() != psi.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
    return std::clamp(f.real(), 0.0, 1.0);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace distance: dimension mismatch");
    const ComplexMatrix diff = rho.matrix() - sigma.matrix();
    double norm = 0.0;
    for (double ev : hermitian_eigenvalues(diff)) norm += std::abs(ev);
    return std::clamp(0.5 * norm, 0.0, 1.0);
}

std::vector<double> born_probabilities(const DensityOperator& rho,
                                       std::span<const ComplexMatrix> effects) {
    if (effects.empty()) throw std::invalid_argument("measurement has no effects");
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& e : effects) {
        if (e.rows() != d || e.cols() != d) throw std::invalid_argument("effect dimension mismatch");
        if (!is_hermitian(e)) throw std::invalid_argument("effect is not Hermitian");
        if (hermitian_eigenvalues(e).front() < -kTolerance) {
            throw std::invalid_argument("effect is not positive semidefinite");
        }
        sum += e;
    }
    if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTolerance) {
        throw std::invalid_argument("effects do not sum to the identity");
    }
    std::vector<double> probs;
    probs.reserve(effects.size());
    for (const auto& e : effects) {
        probs.push_back(std::max(0.0, (e * rho.matrix()).trace().real()));
    }
    return probs;
}

DensityOperator depolarize(const StateVector& psi, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("depolarizing weight outside [0, 1]");
    const auto d = static_cast<Eigen::Index>(psi.dim());
    ComplexMatrix m = (1.0 - lambda) * psi.projector() +
                      (lambda / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
    return DensityOperator(std::move(m), psi.dims());
}

double spectral_gap(std::span<const BinaryMeasurement> strategy, std::span<const double> weights) {
    if (strategy.empty()) throw std::invalid_argument("strategy has no measurements");
    if (strategy.size() != weights.size()) throw std::invalid_argument("one weight per measurement required");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > kTolerance || std::any_of(weights.begin(), weights.end(), [](double w) { return w < 0.0; })) {
        throw std::invalid_argument("strategy weights must form a probability distribution");
    }
    const auto d = static_cast<Eigen::Index>(strategy.front().dim());
    ComplexMatrix omega = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < strategy.size(); ++i) {
        if (strategy[i].effect().rows() != d) throw std::invalid_argument("strategy dimension mismatch");
        omega += weights[i] * strategy[i].effect();
    }
    const auto eig = hermitian_eigenvalues(omega);
    if (eig.back() > 1.0 + kTolerance) throw std::invalid_argument("strategy operator exceeds identity");
    if (eig.size() < 2) return 0.0;
    return std::max(0.0, eig[eig.size() - 1] - eig[eig.size() - 2]);
}

namespace states {

StateVector ghz(std::size_t n) {
    if (n < 2 || n > 4) throw std::invalid_argument("GHZ states are supported for 2 to 4 qubits");
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexVector amp = ComplexVector::Zero(d);
    amp(0) = amp(d - 1) = 1.0 / std::sqrt(2.0);
    return StateVector(std::move(amp));
}

StateVector bell() { return ghz(2); }

StateVector plus() {
    ComplexVector amp(2);
    amp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(std::move(amp));
}

StateVector basis(std::size_t n, std::size_t index) {
    const Eigen::Index d = Eigen::Index{1} << n;
    if (static_cast<Eigen::Index>(index) >= d) throw std::out_of_range("basis index out of range");
    ComplexVector amp = ComplexVector::Zero(d);
    amp(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(amp));
}

DensityOperator maximally_mixed(std::size_t d) {
    if (d == 0) throw std::invalid_argument("dimension must be positive");
    check_budget(d);
    const auto n = static_cast<Eigen::Index>(d);
    std::vector<std::size_t> dims = is_power_of_two(d) ? qubit_dims(d) : std::vector<std::size_t>{d};
    return DensityOperator(ComplexMatrix::Identity(n, n) / static_cast<double>(d), std::move(dims));
}

}  // namespace states

AnyState standard_state(StandardStateKind kind, std::size_t param) {
    switch (kind) {
        case StandardStateKind::ghz: return states::ghz(param);
        case StandardStateKind::bell: return states::bell();
        case StandardStateKind::plus: return states::plus();
        case StandardStateKind::maximally_mixed: return states::maximally_mixed(param);
    }
    throw std::invalid_argument("unsupported standard state");
}

AnyState standard_state(std::string_view name, std::size_t param) {
    if (name == "ghz") return standard_state(StandardStateKind::ghz, param);
    if (name == "bell") return standard_state(StandardStateKind::bell, param);
    if (name == "plus") return standard_state(StandardStateKind::plus, param);
    if (name == "maximally_mixed") return standard_state(StandardStateKind::maximally_mixed, param);
    throw std::invalid_argument("unsupported standard state '" + std::string(name) + "'");
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix eigen_projector(const ComplexMatrix& observable, int outcome) {
    const ComplexMatrix id = ComplexMatrix::Identity(observable.rows(), observable.cols());
    const double sign = outcome == 0 ? 1.0 : -1.0;
    return 0.5 * (id + sign * observable);
}

}  // namespace pauli

}  // namespace diqv
