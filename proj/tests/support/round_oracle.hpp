#pragma once

// Per-round outcome probabilities worked out with Eigen vectors straight from
// the protocol description, without calling into the library's simulator or
// enumerator. Used to check both of those.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <optional>

namespace pingpong::testing {

struct OracleRates {
  double detection = 0.0;
  std::array<double, 2> detection_given_basis{};
  double decode_error = 0.0;
  double eve_accuracy = 0.0;
};

namespace detail {

using Complex = std::complex<double>;
using V2 = Eigen::Vector2cd;
using V4 = Eigen::Vector4cd;

inline V2 basis_vec(int basis, int index) {
  const double r = 1.0 / std::sqrt(2.0);
  if (basis == 0) return index == 0 ? V2(1, 0) : V2(0, 1);
  return index == 0 ? V2(r, r) : V2(r, -r);
}

inline V2 sigma_y(const V2& v) { return V2(v(1), -v(0)); }  // [[0,1],[-1,0]]

inline V4 kron(const V2& a, const V2& b) { return V4(a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1)); }

inline double prob(const V2& basis_vector, const V2& state) { return std::norm(basis_vector.dot(state)); }

}  // namespace detail

/// Ancilla probe in probe basis `pb` (0 or 1) with strength theta.
inline OracleRates probe_oracle(double theta, int pb, double p0 = 0.5) {
  using namespace detail;
  const double c = std::cos(theta), s = std::sin(theta);
  const V2 e0(1, 0), e1(0, 1);
  OracleRates out;
  for (int prep = 0; prep < 2; ++prep) {
    const V2 psi = basis_vec(prep, 0);
    const Complex a0 = basis_vec(pb, 0).dot(psi), a1 = basis_vec(pb, 1).dot(psi);
    const V4 joint = a0 * (c * kron(basis_vec(pb, 0), e0) + s * kron(basis_vec(pb, 1), e1)) +
                     a1 * (c * kron(basis_vec(pb, 1), e0) + s * kron(basis_vec(pb, 0), e1));
    // Control: travel outcome 1 in the preparation basis, any ancilla.
    double abort = 0.0;
    for (const V2& e : {e0, e1}) abort += std::norm(kron(basis_vec(prep, 1), e).dot(joint));
    out.detection_given_basis[prep] = abort;
    out.detection += 0.5 * abort;
    for (int bit = 0; bit < 2; ++bit) {
      const double w = 0.5 * (bit == 0 ? p0 : 1.0 - p0);
      V4 encoded = joint;
      if (bit == 1) {
        const V2 top = sigma_y(V2(joint(0), joint(2))), bottom = sigma_y(V2(joint(1), joint(3)));
        encoded = V4(top(0), bottom(0), top(1), bottom(1));
      }
      for (int t = 0; t < 2; ++t)
        for (int a = 0; a < 2; ++a) {
          const double p = std::norm(kron(basis_vec(pb, t), a == 0 ? e0 : e1).dot(encoded));
          if ((t ^ a) == bit) out.eve_accuracy += w * p;
          out.decode_error += w * p * prob(basis_vec(prep, 1 - bit), basis_vec(pb, t));
        }
    }
  }
  return out;
}

/// Measure-and-resend in `fixed_basis`, or in a fair random basis when empty.
inline OracleRates intercept_oracle(std::optional<int> fixed_basis, double p0 = 0.5) {
  using namespace detail;
  OracleRates out;
  for (int eb = 0; eb < 2; ++eb) {
    const double wb = fixed_basis ? (*fixed_basis == eb ? 1.0 : 0.0) : 0.5;
    if (wb == 0.0) continue;
    for (int prep = 0; prep < 2; ++prep) {
      for (int k = 0; k < 2; ++k) {
        const double pk = wb * prob(basis_vec(eb, k), basis_vec(prep, 0));
        const V2 resent = basis_vec(eb, k);
        const double abort = prob(basis_vec(prep, 1), resent);
        out.detection_given_basis[prep] += pk * abort;
        out.detection += 0.5 * pk * abort;
        for (int bit = 0; bit < 2; ++bit) {
          const double w = 0.5 * pk * (bit == 0 ? p0 : 1.0 - p0);
          const V2 encoded = bit ? sigma_y(resent) : resent;
          for (int k2 = 0; k2 < 2; ++k2) {
            const double p = prob(basis_vec(eb, k2), encoded);
            if ((k ^ k2) == bit) out.eve_accuracy += w * p;
            out.decode_error += w * p * prob(basis_vec(prep, 1 - bit), basis_vec(eb, k2));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace pingpong::testing
