#pragma once

// Closed-form information quantities for the mixed-state ping-pong protocol.
// All entropies are in bits (log base 2) with 0 log 0 = 0.

#include <cstdint>
#include <utility>

#include "pingpong/quantum_core.hpp"

namespace pingpong {

/// Non-negative, finite amount of information in bits.
class Bits {
 public:
  /// Rounding noise down to -1e-12 is clamped to zero; anything more negative,
  /// or NaN, throws PreconditionError.
  explicit Bits(double value);

  double value() const { return value_; }

 private:
  double value_;
};

/// Eve's view after her probe and Bob's encoding: detection probability d and
/// Bob's encoding priors p0 (identity) / p1 (i sigma_y).
struct EveModelParams {
  double d;
  double p0;
  double p1;

  /// Requires 0 <= d <= 1, p0, p1 >= 0 and p0 + p1 = 1 within 1e-12.
  void validate() const;
};

/// Control probability c, per-control-round detection probability d and
/// transmitted message bits n.
struct SurvivalParams {
  double c;
  double d;
  std::uint64_t n;

  /// Requires 0 < c < 1, 0 <= d <= 1/2, n >= 1.
  void validate() const;
};

/// -p log2 p - (1-p) log2 (1-p). Requires 0 <= p <= 1.
Bits binary_entropy(double p);

/// -sum_i lambda_i log2 lambda_i over the eigenvalues of rho. Eigenvalues in
/// [-1e-10, 0) are treated as zero.
Bits von_neumann_entropy(const DensityMatrix& rho);

/// Holevo quantity S(sum_i p_i rho_i) - sum_i p_i S(rho_i).
Bits holevo_chi(const Ensemble& ensemble);

/// Alice's source: |0> and |phi0>, each with probability 1/2.
Ensemble alice_source_ensemble();

/// Eve's two-dimensional state after Bob's encoding, in the basis
/// {|phi0,e0>, |phi1,e1>}:
///   [[1-d, sqrt(d(1-d)) (p0-p1)], [sqrt(d(1-d)) (p0-p1), d]]
/// The probe amplitudes are taken real and non-negative, alpha = sqrt(1-d)
/// and beta = sqrt(d); phases would not change the spectrum.
DensityMatrix eve_encoded_density(const EveModelParams& params);

/// 1/2 +- 1/2 sqrt(1 - (4d - 4d^2)(1 - (p0-p1)^2)), larger first. The radicand
/// is clamped to [0, 1].
std::pair<double, double> eve_eigenvalues_closed_form(const EveModelParams& params);

/// Eve's information bound for equal priors, I(d) = H_bin(d). Requires
/// 0 <= d <= 1.
Bits eve_information_bound(double d);

/// Probability that Eve stays undetected over n message bits,
/// (1 - c d)^(n / (1 - c)).
double survival_probability(const SurvivalParams& params);

}  // namespace pingpong
