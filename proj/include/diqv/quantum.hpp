#pragma once

// Dense few-qubit states, measurements, and distance measures.
//
// Ordering convention: in every tensor product the first factor (party 1,
// or round 1) is the most significant index. Games, sources, and the
// conditional-state machinery all rely on this.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace diqv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Validator tolerance for normalization, hermiticity and positivity.
inline constexpr double kTolerance = 1e-9;

/// Largest Hilbert-space dimension any operation will build.
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 14;

/// Normalized pure state on a product of subsystems.
class StateVector {
public:
    /// Single-factor state; the dimension must be a power of two.
    explicit StateVector(ComplexVector amplitudes);
    StateVector(ComplexVector amplitudes, std::vector<std::size_t> dims);

    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    const std::vector<std::size_t>& dims() const { return dims_; }

    /// |psi><psi|
    ComplexMatrix projector() const;

private:
    ComplexVector amplitudes_;
    std::vector<std::size_t> dims_;
};

/// Validated density operator (Hermitian, PSD, unit trace).
class DensityOperator {
public:
    DensityOperator(ComplexMatrix matrix, std::vector<std::size_t> dims);

    static DensityOperator from_pure(const StateVector& psi);

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<std::size_t>& dims() const { return dims_; }

private:
    ComplexMatrix matrix_;
    std::vector<std::size_t> dims_;
};

/// Two-outcome measurement described by its outcome-1 effect.
class BinaryMeasurement {
public:
    explicit BinaryMeasurement(ComplexMatrix effect);

    const ComplexMatrix& effect() const { return effect_; }
    /// identity - effect
    ComplexMatrix complement() const;
    std::size_t dim() const { return static_cast<std::size_t>(effect_.rows()); }

private:
    ComplexMatrix effect_;
};

/// Throws std::invalid_argument unless `m` is a valid density matrix.
void validate_density(const ComplexMatrix& m, double tol = kTolerance);

bool is_hermitian(const ComplexMatrix& m, double tol = kTolerance);

/// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

/// Keeps the subsystems listed in `keep` (any order; result follows the
/// original subsystem order).
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep);

/// Partial trace on an unnormalized operator. Used for the conditional-state
/// construction where the operand has been multiplied by measurement effects.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// <psi|rho|psi>
double fidelity_with_pure(const DensityOperator& rho, const StateVector& psi);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Outcome probabilities Tr[E_k rho]; the effects must sum to identity.
std::vector<double> born_probabilities(const DensityOperator& rho,
                                       std::span<const ComplexMatrix> effects);

/// (1 - lambda)|psi><psi| + lambda I/d
DensityOperator depolarize(const StateVector& psi, double lambda);

/// Gap between the two largest eigenvalues of sum_i w_i E_i.
double spectral_gap(std::span<const BinaryMeasurement> strategy, std::span<const double> weights);

namespace states {

/// (|0...0> + |1...1>)/sqrt(2) on n qubits, 2 <= n <= 4.
StateVector ghz(std::size_t n);
/// (|00> + |11>)/sqrt(2)
StateVector bell();
/// (|0> + |1>)/sqrt(2)
StateVector plus();
/// |b> on n qubits.
StateVector basis(std::size_t n, std::size_t index);
/// I/d split into qubits when d is a power of two.
DensityOperator maximally_mixed(std::size_t d);

}  // namespace states

enum class StandardStateKind { ghz, bell, plus, maximally_mixed };

using AnyState = std::variant<StateVector, DensityOperator>;

/// `param` is the qubit count for ghz and the dimension for maximally_mixed;
/// ignored otherwise.
AnyState standard_state(StandardStateKind kind, std::size_t param = 0);

/// Name lookup ("ghz", "bell", "plus", "maximally_mixed"); throws
/// std::invalid_argument on an unknown name.
AnyState standard_state(std::string_view name, std::size_t param = 0);

namespace pauli {

ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// Projector onto the +1 (outcome 0) or -1 (outcome 1) eigenspace of a
/// +/-1-valued observable.
ComplexMatrix eigen_projector(const ComplexMatrix& observable, int outcome);

}  // namespace pauli

}  // namespace diqv
