#include "pingpong/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "pingpong/errors.hpp"

namespace pingpong {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool valid_dim(std::size_t dim) { return dim == 2 || dim == 4; }

double snap_probability(double p) {
  if (p < kAlgebraicTolerance) return 0.0;
  if (p > 1.0 - kAlgebraicTolerance) return 1.0;
  return p;
}

template <std::size_t N>
std::array<double, N> normalize_probabilities(std::array<double, N> p) {
  for (auto& v : p) v = snap_probability(v);
  double total = 0.0;
  for (double v : p) total += v;
  for (auto& v : p) v /= total;
  return p;
}

template <std::size_t N>
std::size_t sample_index(const std::array<double, N>& p, RandomSource& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    cumulative += p[k];
    if (p[k] > 0.0 && u < cumulative) return k;
  }
  // Rounding in the cumulative sum: fall back to the last outcome with support.
  for (std::size_t k = N; k-- > 0;) {
    if (p[k] > 0.0) return k;
  }
  return N - 1;
}

}  // namespace

const char* to_string(Basis basis) { return basis == Basis::B0 ? "B0" : "B1"; }

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  require(data_.size() == dim_ * dim_, "ComplexMatrix: entry count must be dim*dim");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
  require(dim_ == other.dim_, "max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
  return worst;
}

bool ComplexMatrix::is_hermitian(double tolerance) const { return max_abs_diff(adjoint()) <= tolerance; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.dim_ == b.dim_, "matrix product: dimension mismatch");
  const std::size_t n = a.dim_;
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a_rk = a(r, k);
      if (a_rk == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += a_rk * b(k, c);
    }
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.dim_ == b.dim_, "matrix sum: dimension mismatch");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
  return out;
}

ComplexMatrix operator*(Complex scale, const ComplexMatrix& m) {
  ComplexMatrix out = m;
  for (auto& v : out.data_) v *= scale;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t ra = 0; ra < na; ++ra)
    for (std::size_t ca = 0; ca < na; ++ca)
      for (std::size_t rb = 0; rb < nb; ++rb)
        for (std::size_t cb = 0; cb < nb; ++cb) out(ra * nb + rb, ca * nb + cb) = a(ra, ca) * b(rb, cb);
  return out;
}

// ---------------------------------------------------------------------------
// PureState / Operator

PureState::PureState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  require(valid_dim(amplitudes_.size()), "PureState: dimension must be 2 or 4");
  for (const auto& a : amplitudes_)
    require(std::isfinite(a.real()) && std::isfinite(a.imag()), "PureState: amplitudes must be finite");
  require(std::abs(norm() - 1.0) <= kAlgebraicTolerance, "PureState: norm must be 1 within 1e-12");
}

double PureState::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

Complex inner(const PureState& a, const PureState& b) {
  require(a.dim() == b.dim(), "inner: dimension mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

double max_abs_diff(const PureState& a, const PureState& b) {
  require(a.dim() == b.dim(), "max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

Operator::Operator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  require(valid_dim(matrix_.dim()), "Operator: dimension must be 2 or 4");
}

Operator Operator::identity(std::size_t dim) { return Operator(ComplexMatrix::identity(dim)); }

bool Operator::is_unitary(double tolerance) const {
  return (matrix_.adjoint() * matrix_).max_abs_diff(ComplexMatrix::identity(dim())) < tolerance;
}

Operator kron(const Operator& a, const Operator& b) { return Operator(kron(a.matrix(), b.matrix())); }

// ---------------------------------------------------------------------------
// DensityMatrix / Ensemble

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  require(valid_dim(matrix_.dim()), "DensityMatrix: dimension must be 2 or 4");
  require(matrix_.is_hermitian(kAlgebraicTolerance), "DensityMatrix: must be Hermitian within 1e-12");
  require(std::abs(matrix_.trace() - Complex{1.0}) <= kAlgebraicTolerance,
          "DensityMatrix: trace must be 1 within 1e-12");
  const auto eigenvalues = hermitian_eigenvalues(matrix_);
  require(eigenvalues.back() >= -kEigenTolerance, "DensityMatrix: eigenvalues must be >= -1e-10");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  ComplexMatrix m(psi.dim());
  for (std::size_t r = 0; r < psi.dim(); ++r)
    for (std::size_t c = 0; c < psi.dim(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return DensityMatrix(std::move(m));
}

Ensemble::Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
  require(!members_.empty(), "Ensemble: at least one member required");
  double total = 0.0;
  for (const auto& m : members_) {
    require(m.probability >= 0.0, "Ensemble: probabilities must be >= 0");
    require(m.state.dim() == members_.front().state.dim(), "Ensemble: members must share one dimension");
    total += m.probability;
  }
  require(std::abs(total - 1.0) <= kAlgebraicTolerance, "Ensemble: probabilities must sum to 1 within 1e-12");
}

Ensemble Ensemble::of_pure_states(std::span<const std::pair<double, PureState>> members) {
  std::vector<EnsembleMember> out;
  out.reserve(members.size());
  for (const auto& [p, psi] : members) out.push_back({p, DensityMatrix::pure(psi)});
  return Ensemble(std::move(out));
}

// ---------------------------------------------------------------------------
// States and operators of the protocol

std::pair<PureState, PureState> basis_states(Basis basis) {
  if (basis == Basis::B0) return {PureState({1.0, 0.0}), PureState({0.0, 1.0})};
  return {PureState({kInvSqrt2, kInvSqrt2}), PureState({kInvSqrt2, -kInvSqrt2})};
}

PureState basis_state(Basis basis, int index) {
  require(index == 0 || index == 1, "basis_state: index must be 0 or 1");
  auto [first, second] = basis_states(basis);
  return index == 0 ? first : second;
}

Operator encode_operator(Bit bit) {
  require(bit == 0 || bit == 1, "encode_operator: bit must be 0 or 1");
  if (bit == 0) return Operator::identity(2);
  return Operator(ComplexMatrix(2, {0.0, 1.0, -1.0, 0.0}));
}

PureState apply(const Operator& op, const PureState& state) {
  require(op.dim() == state.dim(), "apply: operator and state dimensions differ");
  std::vector<Complex> out(state.dim());
  const auto& m = op.matrix();
  for (std::size_t r = 0; r < state.dim(); ++r)
    for (std::size_t c = 0; c < state.dim(); ++c) out[r] += m(r, c) * state[c];
  return PureState(std::move(out));
}

PureState tensor(const PureState& travel, const PureState& ancilla) {
  require(travel.dim() == 2 && ancilla.dim() == 2, "tensor: both factors must have dimension 2");
  std::vector<Complex> out(4);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t a = 0; a < 2; ++a) out[2 * t + a] = travel[t] * ancilla[a];
  return PureState(std::move(out));
}

std::array<double, 2> outcome_probabilities(const PureState& state, Basis basis) {
  require(state.dim() == 2, "outcome_probabilities: state must have dimension 2");
  const auto [b0, b1] = basis_states(basis);
  return normalize_probabilities<2>({std::norm(inner(b0, state)), std::norm(inner(b1, state))});
}

std::array<double, 4> joint_outcome_probabilities(const PureState& state, Basis travel_basis,
                                                  Basis ancilla_basis) {
  require(state.dim() == 4, "joint_outcome_probabilities: state must have dimension 4");
  std::array<double, 4> p{};
  for (int t = 0; t < 2; ++t)
    for (int a = 0; a < 2; ++a) {
      const auto product = tensor(basis_state(travel_basis, t), basis_state(ancilla_basis, a));
      p[2 * t + a] = std::norm(inner(product, state));
    }
  return normalize_probabilities(p);
}

Measurement measure_in_basis(const PureState& state, Basis basis, RandomSource& rng) {
  const auto p = outcome_probabilities(state, basis);
  const int k = static_cast<int>(sample_index(p, rng));
  return {k, basis_state(basis, k)};
}

JointMeasurement measure_joint(const PureState& state, Basis travel_basis, Basis ancilla_basis,
                               RandomSource& rng) {
  const auto p = joint_outcome_probabilities(state, travel_basis, ancilla_basis);
  const auto k = sample_index(p, rng);
  const int t = static_cast<int>(k / 2), a = static_cast<int>(k % 2);
  return {t, a, tensor(basis_state(travel_basis, t), basis_state(ancilla_basis, a))};
}

DensityMatrix density_from_ensemble(const Ensemble& ensemble) {
  ComplexMatrix sum(ensemble.dim());
  for (const auto& m : ensemble.members()) sum = sum + Complex{m.probability} * m.state.matrix();
  return DensityMatrix(std::move(sum));
}

DensityMatrix partial_trace_ancilla(const DensityMatrix& joint) {
  require(joint.dim() == 4, "partial_trace_ancilla: input must have dimension 4");
  ComplexMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) out(i, j) += joint(2 * i + k, 2 * j + k);
  return DensityMatrix(std::move(out));
}

// ---------------------------------------------------------------------------
// Eigenvalues

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& matrix) {
  require(matrix.dim() > 0, "hermitian_eigenvalues: empty matrix");
  require(matrix.is_hermitian(kAlgebraicTolerance), "hermitian_eigenvalues: input is not Hermitian within 1e-12");
  if (matrix.dim() == 2) {
    const double a = matrix(0, 0).real(), d = matrix(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(matrix(0, 1)));
    return {mean + radius, mean - radius};
  }
  return hermitian_eigenvalues_iterative(matrix);
}

std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho) { return hermitian_eigenvalues(rho.matrix()); }

std::vector<double> hermitian_eigenvalues_iterative(const ComplexMatrix& matrix) {
  const std::size_t n = matrix.dim();
  ComplexMatrix h = matrix;
  // Symmetrize so the diagonal is exactly real.
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
      h(j, i) = std::conj(h(i, j));
    }
  }

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(h(i, j));
    return std::sqrt(s);
  };
  double full = 0.0;
  for (const auto& v : h.data()) full += std::norm(v);
  full = std::sqrt(full);
  const double threshold = 1e-12 * std::max(full, 1.0);

  auto sweep = [&] {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(h(p, q));
        if (r == 0.0) continue;
        // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] zeroes h(p, q).
        const Complex phase = h(p, q) / r;  // e^{i phi}
        const double a = h(p, p).real(), b = h(q, q).real();
        const double angle = 0.5 * std::atan2(2.0 * r, b - a);
        const double c = std::cos(angle), s = std::sin(angle);
        const Complex g_pp = c, g_pq = s, g_qp = -s * std::conj(phase), g_qq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // h <- h G
          const Complex hkp = h(k, p), hkq = h(k, q);
          h(k, p) = hkp * g_pp + hkq * g_qp;
          h(k, q) = hkp * g_pq + hkq * g_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // h <- G^dagger h
          const Complex hpk = h(p, k), hqk = h(q, k);
          h(p, k) = std::conj(g_pp) * hpk + std::conj(g_qp) * hqk;
          h(q, k) = std::conj(g_pq) * hpk + std::conj(g_qq) * hqk;
        }
        h(p, q) = 0.0;
        h(q, p) = 0.0;
        h(p, p) = h(p, p).real();
        h(q, q) = h(q, q).real();
      }
  };

  constexpr int kMaxSweeps = 64;
  int sweeps = 0;
  while (off_norm() > threshold && sweeps < kMaxSweeps) {
    sweep();
    ++sweeps;
  }
  sweep();

  std::vector<double> eigenvalues(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = h(i, i).real();
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  return eigenvalues;
}

// ---------------------------------------------------------------------------
// Probe unitary

namespace {

using Column = std::array<Complex, 4>;

Complex dot(const Column& a, const Column& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double column_norm(const Column& v) { return std::sqrt(std::real(dot(v, v))); }

Column orthogonalize(Column v, const std::vector<Column>& fixed) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : fixed) {
      const Complex overlap = dot(u, v);
      for (std::size_t i = 0; i < 4; ++i) v[i] -= overlap * u[i];
    }
  return v;
}

Column complete_column(const std::vector<Column>& fixed) {
  Column best{};
  double best_norm = -1.0;
  for (std::size_t k = 0; k < 4; ++k) {
    Column seed{};
    seed[k] = 1.0;
    const Column residual = orthogonalize(seed, fixed);
    const double n = column_norm(residual);
    if (n > best_norm + 1e-9) {
      best = residual;
      best_norm = n;
    }
  }
  for (auto& v : best) v /= best_norm;
  return best;
}

}  // namespace

Operator build_probe_unitary(double theta, Basis probe_basis) {
  require(std::isfinite(theta) && theta >= 0.0 && theta <= std::numbers::pi / 2,
          "build_probe_unitary: theta must lie in [0, pi/2]");
  const double c = std::cos(theta), s = std::sin(theta);

  // Columns in the probe frame {|b0,0>, |b0,1>, |b1,0>, |b1,1>}.
  const Column b0_zero{c, 0.0, 0.0, s};
  const Column b1_zero{0.0, s, c, 0.0};
  std::vector<Column> fixed{b0_zero, b1_zero};
  const Column b0_one = complete_column(fixed);
  fixed.push_back(b0_one);
  const Column b1_one = complete_column(fixed);

  ComplexMatrix frame_unitary(4);
  const std::array<const Column*, 4> columns{&b0_zero, &b0_one, &b1_zero, &b1_one};
  for (std::size_t col = 0; col < 4; ++col)
    for (std::size_t row = 0; row < 4; ++row) frame_unitary(row, col) = (*columns[col])[row];

  // Change of frame: column 2t+a of T is b_t ⊗ |a>.
  ComplexMatrix basis_change(2);
  const auto [b0, b1] = basis_states(probe_basis);
  for (std::size_t r = 0; r < 2; ++r) {
    basis_change(r, 0) = b0[r];
    basis_change(r, 1) = b1[r];
  }
  const ComplexMatrix frame = kron(basis_change, ComplexMatrix::identity(2));
  return Operator(frame * frame_unitary * frame.adjoint());
}

}  // namespace pingpong
