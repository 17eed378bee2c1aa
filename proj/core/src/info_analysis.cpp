#include "pingpong/info_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pingpong/errors.hpp"

namespace pingpong {

namespace {

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

Bits::Bits(double value) : value_(value) {
  require(!std::isnan(value), "Bits: value must not be NaN");
  require(value >= -kAlgebraicTolerance, "Bits: value must be >= 0");
  if (value_ < 0.0) value_ = 0.0;
}

void EveModelParams::validate() const {
  require(std::isfinite(d) && d >= 0.0 && d <= 1.0, "EveModelParams: d must lie in [0, 1]");
  require(p0 >= 0.0 && p1 >= 0.0, "EveModelParams: p0 and p1 must be >= 0");
  require(std::abs(p0 + p1 - 1.0) <= kAlgebraicTolerance, "EveModelParams: p0 + p1 must equal 1");
}

void SurvivalParams::validate() const {
  require(std::isfinite(c) && c > 0.0 && c < 1.0, "SurvivalParams: c must lie in (0, 1)");
  require(std::isfinite(d) && d >= 0.0 && d <= 0.5, "SurvivalParams: d must lie in [0, 1/2]");
  require(n >= 1, "SurvivalParams: n must be >= 1");
}

Bits binary_entropy(double p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "binary_entropy: p must lie in [0, 1]");
  return Bits(entropy_term(p) + entropy_term(1.0 - p));
}

Bits von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : hermitian_eigenvalues(rho)) s += entropy_term(std::max(lambda, 0.0));
  return Bits(s);
}

Bits holevo_chi(const Ensemble& ensemble) {
  double average = 0.0;
  for (const auto& m : ensemble.members()) average += m.probability * von_neumann_entropy(m.state).value();
  return Bits(std::max(von_neumann_entropy(density_from_ensemble(ensemble)).value() - average, 0.0));
}

Ensemble alice_source_ensemble() {
  const std::vector<std::pair<double, PureState>> members{{0.5, basis_state(Basis::B0, 0)},
                                                           {0.5, basis_state(Basis::B1, 0)}};
  return Ensemble::of_pure_states(members);
}

DensityMatrix eve_encoded_density(const EveModelParams& params) {
  params.validate();
  const double d = params.d;
  const double coherence = std::sqrt(d * (1.0 - d)) * (params.p0 - params.p1);
  return DensityMatrix(ComplexMatrix(2, {1.0 - d, coherence, coherence, d}));
}

std::pair<double, double> eve_eigenvalues_closed_form(const EveModelParams& params) {
  params.validate();
  const double d = params.d;
  const double bias = params.p0 - params.p1;
  const double radicand = std::clamp(1.0 - (4.0 * d - 4.0 * d * d) * (1.0 - bias * bias), 0.0, 1.0);
  const double half_root = 0.5 * std::sqrt(radicand);
  return {0.5 + half_root, 0.5 - half_root};
}

Bits eve_information_bound(double d) {
  require(std::isfinite(d) && d >= 0.0 && d <= 1.0, "eve_information_bound: d must lie in [0, 1]");
  return binary_entropy(d);
}

double survival_probability(const SurvivalParams& params) {
  params.validate();
  return std::pow(1.0 - params.c * params.d, static_cast<double>(params.n) / (1.0 - params.c));
}

}  // namespace pingpong
