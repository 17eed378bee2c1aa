#pragma once

// Dense complex linear algebra for the travel qubit (dimension 2) and the
// travel ⊗ ancilla pair (dimension 4).
//
// Index convention for dimension-4 vectors and matrices:
//   amplitude index = 2 * travel_index + ancilla_index
// i.e. the travel qubit is the slow index of every Kronecker product.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pingpong/random.hpp"

namespace pingpong {

using Complex = std::complex<double>;

/// Classical bit value carried by the protocol (0 or 1).
using Bit = int;

/// Algebraic identities (norms, unitarity, hermiticity, trace) hold to this.
inline constexpr double kAlgebraicTolerance = 1e-12;
/// Eigenvalues from the iterative solver, and the PSD floor for density matrices.
inline constexpr double kEigenTolerance = 1e-10;

enum class Basis {
  B0,  ///< computational {|0>, |1>}
  B1,  ///< diagonal {|phi0>, |phi1>} with |phi0,1> = (|0> +- |1>)/sqrt(2)
};

const char* to_string(Basis basis);

/// Square complex matrix in row-major order.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }
  std::span<const Complex> data() const { return data_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  /// max over entries of |a_ij - b_ij|.
  double max_abs_diff(const ComplexMatrix& other) const;
  bool is_hermitian(double tolerance = kAlgebraicTolerance) const;

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(Complex scale, const ComplexMatrix& m);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Unit-norm amplitude vector of dimension 2 or 4.
class PureState {
 public:
  /// Throws PreconditionError unless dim is 2 or 4 and the norm is 1 within
  /// kAlgebraicTolerance.
  explicit PureState(std::vector<Complex> amplitudes);

  std::size_t dim() const { return amplitudes_.size(); }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  double norm() const;

 private:
  std::vector<Complex> amplitudes_;
};

/// <a|b>
Complex inner(const PureState& a, const PureState& b);
/// Max entrywise |a_i - b_i|; dimensions must agree.
double max_abs_diff(const PureState& a, const PureState& b);

/// Square matrix of dimension 2 or 4 acting on PureState.
class Operator {
 public:
  explicit Operator(ComplexMatrix matrix);

  static Operator identity(std::size_t dim);

  std::size_t dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Operator adjoint() const { return Operator(matrix_.adjoint()); }
  /// ||U^dagger U - I||_max < tolerance.
  bool is_unitary(double tolerance = kAlgebraicTolerance) const;

  friend Operator operator*(const Operator& a, const Operator& b) { return Operator(a.matrix_ * b.matrix_); }

 private:
  ComplexMatrix matrix_;
};

Operator kron(const Operator& a, const Operator& b);

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
class DensityMatrix {
 public:
  /// Validates hermiticity and trace to kAlgebraicTolerance and every
  /// eigenvalue >= -kEigenTolerance; throws PreconditionError otherwise.
  explicit DensityMatrix(ComplexMatrix matrix);

  /// |psi><psi|
  static DensityMatrix pure(const PureState& psi);

  std::size_t dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Complex& operator()(std::size_t row, std::size_t col) const { return matrix_(row, col); }

 private:
  ComplexMatrix matrix_;
};

struct EnsembleMember {
  double probability;
  DensityMatrix state;
};

/// Probability-weighted collection of states of one dimension.
class Ensemble {
 public:
  /// Throws PreconditionError if empty, if any probability is negative, if
  /// the probabilities do not sum to 1 within kAlgebraicTolerance, or if the
  /// member dimensions differ.
  explicit Ensemble(std::vector<EnsembleMember> members);
  static Ensemble of_pure_states(std::span<const std::pair<double, PureState>> members);

  std::span<const EnsembleMember> members() const { return members_; }
  std::size_t dim() const { return members_.front().state.dim(); }

 private:
  std::vector<EnsembleMember> members_;
};

/// The two basis vectors in index order.
std::pair<PureState, PureState> basis_states(Basis basis);
PureState basis_state(Basis basis, int index);

/// bit 0 -> I, bit 1 -> i*sigma_y = |0><1| - |1><0|.
Operator encode_operator(Bit bit);

/// Matrix-vector product. No renormalization; throws PreconditionError on a
/// dimension mismatch or if the result is not unit norm (op not unitary on
/// this state).
PureState apply(const Operator& op, const PureState& state);

/// Kronecker product travel ⊗ ancilla.
PureState tensor(const PureState& travel, const PureState& ancilla);

/// Born probabilities |<b_k|psi>|^2 for a dimension-2 state. Values within
/// kAlgebraicTolerance of 0 or 1 are snapped so deterministic outcomes are
/// exactly deterministic.
std::array<double, 2> outcome_probabilities(const PureState& state, Basis basis);

/// Born probabilities for the product basis travel_basis ⊗ ancilla_basis,
/// indexed 2 * travel_index + ancilla_index. Same snapping as above.
std::array<double, 4> joint_outcome_probabilities(const PureState& state, Basis travel_basis,
                                                  Basis ancilla_basis);

struct Measurement {
  int index;
  PureState post_state;  ///< the basis vector itself, global phase discarded
};

struct JointMeasurement {
  int travel_index;
  int ancilla_index;
  PureState post_state;  ///< b_travel ⊗ b_ancilla
};

/// Projective measurement of a dimension-2 state. Consumes one uniform draw.
Measurement measure_in_basis(const PureState& state, Basis basis, RandomSource& rng);

/// Projective measurement of a dimension-4 state in a product basis. Consumes
/// one uniform draw; outcomes are ordered (0,0), (0,1), (1,0), (1,1).
JointMeasurement measure_joint(const PureState& state, Basis travel_basis, Basis ancilla_basis,
                               RandomSource& rng);

/// sum_i p_i rho_i
DensityMatrix density_from_ensemble(const Ensemble& ensemble);

/// Tr_ancilla of a dimension-4 density matrix.
DensityMatrix partial_trace_ancilla(const DensityMatrix& joint);

/// Eigenvalues of a Hermitian matrix in descending order. Dimension 2 uses the
/// closed form, larger dimensions the Jacobi solver below. Throws
/// PreconditionError if the input is not Hermitian within kAlgebraicTolerance.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& matrix);
std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho);

/// Cyclic complex Jacobi eigenvalue iteration for any dimension, descending.
/// Sweeps until the off-diagonal Frobenius norm falls below 1e-12 relative to
/// the full norm, then runs one more sweep.
std::vector<double> hermitian_eigenvalues_iterative(const ComplexMatrix& matrix);

/// Eve's probe unitary on travel ⊗ ancilla, with {b0, b1} = probe_basis:
///   U |b0,0> = cos(theta) |b0,0> + sin(theta) |b1,1>
///   U |b1,0> = cos(theta) |b1,0> + sin(theta) |b0,1>
/// so a control measurement in probe_basis fails with probability
/// d = sin^2(theta).
///
/// The columns for the ancilla-|1> inputs (|b0,1> then |b1,1>) are completed
/// by Gram-Schmidt in the probe-frame product basis: for each column the
/// canonical seeds e0..e3 are orthogonalized (two passes) against all columns
/// fixed so far, and the seed with the largest residual norm is taken, ties
/// within 1e-9 going to the lower index.
///
/// Requires theta in [0, pi/2].
Operator build_probe_unitary(double theta, Basis probe_basis);

}  // namespace pingpong
