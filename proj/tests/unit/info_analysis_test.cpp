#include "pingpong/info_analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pingpong/errors.hpp"
#include "test_support.hpp"

using namespace pingpong;
using pingpong::testing::Generator;

namespace {

constexpr double kTol = 1e-12;

// Direct evaluation of -p log2 p - (1-p) log2(1-p), independent of the library.
double h2(double p) {
  double s = 0.0;
  if (p > 0) s -= p * std::log2(p);
  if (p < 1) s -= (1 - p) * std::log2(1 - p);
  return s;
}

std::vector<std::pair<double, PureState>> two_states(const PureState& a, const PureState& b) {
  return {{0.5, a}, {0.5, b}};
}

}  // namespace

// ---------- Bits ----------
TEST(Bits, ClampsRoundingNoiseAndRejectsNegatives) {
  EXPECT_EQ(Bits(-1e-13).value(), 0.0);
  EXPECT_EQ(Bits(0.25).value(), 0.25);
  EXPECT_THROW(Bits(-1e-6), PreconditionError);
  EXPECT_THROW(Bits(std::numeric_limits<double>::quiet_NaN()), PreconditionError);
}

// ---------- binary entropy ----------
TEST(BinaryEntropy, Examples) {
  EXPECT_EQ(binary_entropy(0.5).value(), 1.0);
  EXPECT_EQ(binary_entropy(0.0).value(), 0.0);
  EXPECT_EQ(binary_entropy(1.0).value(), 0.0);
  EXPECT_NEAR(binary_entropy(0.25).value(), 0.811278, 1e-6);
  EXPECT_NEAR(binary_entropy(0.25).value(), 0.75 * std::log2(4.0 / 3.0) + 0.25 * 2.0, kTol);
}

TEST(BinaryEntropy, RejectsOutOfRange) {
  EXPECT_THROW(binary_entropy(-0.01), PreconditionError);
  EXPECT_THROW(binary_entropy(1.01), PreconditionError);
  EXPECT_THROW(binary_entropy(std::nan("")), PreconditionError);
}

TEST(BinaryEntropy, SymmetricAboutHalf) {
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    EXPECT_NEAR(binary_entropy(p).value(), binary_entropy(1 - p).value(), kTol);
  }
}

TEST(BinaryEntropy, ConcaveOnRandomPairs) {
  Generator gen(101);
  for (int i = 0; i < 1000; ++i) {
    const double p = gen.uniform(), q = gen.uniform();
    EXPECT_GE(binary_entropy((p + q) / 2).value() + kTol, (binary_entropy(p).value() + binary_entropy(q).value()) / 2);
  }
}

TEST(BinaryEntropy, ConcaveOnGrid) {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double p = i / 20.0, q = j / 20.0;
      EXPECT_GE(binary_entropy((p + q) / 2).value() + kTol,
                (binary_entropy(p).value() + binary_entropy(q).value()) / 2);
    }
}

// ---------- von Neumann entropy ----------
TEST(VonNeumannEntropy, PureStatesHaveZeroEntropy) {
  Generator gen(103);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(von_neumann_entropy(DensityMatrix::pure(gen.state(2))).value(), 0.0, 1e-9);
  EXPECT_EQ(von_neumann_entropy(DensityMatrix::pure(basis_state(Basis::B1, 0))).value(), 0.0);
}

TEST(VonNeumannEntropy, MaximallyMixedQubit) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(ComplexMatrix(2, {0.5, 0.0, 0.0, 0.5}))).value(), 1.0, kTol);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(ComplexMatrix(4, {0.25, 0, 0, 0, 0, 0.25, 0, 0, 0, 0, 0.25, 0,
                                                                  0, 0, 0, 0.25})))
                  .value(),
              2.0, 1e-10);
}

TEST(VonNeumannEntropy, SourceDensity) {
  const auto rho = density_from_ensemble(alice_source_ensemble());
  // Plug lambda = 1/2 +- sqrt(2)/4 into the two-outcome entropy.
  const double lambda = 0.5 + std::sqrt(2.0) / 4;
  EXPECT_NEAR(von_neumann_entropy(rho).value(), h2(lambda), kTol);
  EXPECT_NEAR(von_neumann_entropy(rho).value(), pingpong::testing::reference_entropy(rho.matrix()), 1e-10);
  EXPECT_NEAR(von_neumann_entropy(rho).value(), 0.6008760366928562, 1e-12);
}

TEST(VonNeumannEntropy, MatchesEigenOnRandomDensities) {
  Generator gen(107);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = i % 2 ? 4 : 2;
    const auto rho = density_from_ensemble(Ensemble::of_pure_states(gen.pure_ensemble(dim, 1 + i % 5)));
    EXPECT_NEAR(von_neumann_entropy(rho).value(), pingpong::testing::reference_entropy(rho.matrix()), 1e-9);
  }
}

// ---------- Holevo chi ----------
TEST(HolevoChi, SourceEnsemble) {
  const double chi = holevo_chi(alice_source_ensemble()).value();
  EXPECT_NEAR(chi, 0.6008760366928562, 1e-6);
  EXPECT_LT(chi, binary_entropy(0.5).value());
}

TEST(HolevoChi, OrthogonalAndIdenticalStates) {
  const auto zero = basis_state(Basis::B0, 0), one = basis_state(Basis::B0, 1);
  EXPECT_NEAR(holevo_chi(Ensemble::of_pure_states(two_states(zero, one))).value(), 1.0, kTol);
  EXPECT_NEAR(holevo_chi(Ensemble::of_pure_states(two_states(zero, zero))).value(), 0.0, kTol);
}

TEST(HolevoChi, MixedMembersSubtractAverageEntropy) {
  const DensityMatrix half(ComplexMatrix(2, {0.5, 0.0, 0.0, 0.5}));
  const Ensemble e({{0.5, half}, {0.5, half}});
  EXPECT_NEAR(holevo_chi(e).value(), 0.0, kTol);
}

TEST(HolevoChi, NonNegativeAndBoundedOnRandomEnsembles) {
  Generator gen(109);
  for (int i = 0; i < 500; ++i) {
    const auto members = gen.pure_ensemble(2, 2 + i % 3);
    const double chi = holevo_chi(Ensemble::of_pure_states(members)).value();
    EXPECT_GE(chi, 0.0);
    EXPECT_LE(chi, 1.0 + 1e-10);  // qubit states carry at most one bit
  }
}

// ---------- Eve's encoded density ----------
TEST(EveEncodedDensity, Examples) {
  EXPECT_LE(eve_encoded_density({0.0, 0.5, 0.5}).matrix().max_abs_diff(ComplexMatrix(2, {1.0, 0.0, 0.0, 0.0})), kTol);
  EXPECT_LE(eve_encoded_density({0.5, 0.5, 0.5}).matrix().max_abs_diff(ComplexMatrix(2, {0.5, 0.0, 0.0, 0.5})), kTol);
  const double r = std::sqrt(3.0) / 4;
  EXPECT_LE(eve_encoded_density({0.25, 1.0, 0.0}).matrix().max_abs_diff(ComplexMatrix(2, {0.75, r, r, 0.25})), kTol);
}

TEST(EveModelParams, Validation) {
  EXPECT_THROW(eve_encoded_density({-0.1, 0.5, 0.5}), PreconditionError);
  EXPECT_THROW(eve_encoded_density({1.1, 0.5, 0.5}), PreconditionError);
  EXPECT_THROW(eve_encoded_density({0.2, 0.6, 0.6}), PreconditionError);
  EXPECT_THROW(eve_eigenvalues_closed_form({0.2, -0.1, 1.1}), PreconditionError);
  EXPECT_NO_THROW(eve_encoded_density({1.0, 0.3, 0.7}));
}

TEST(EveEigenvalues, Examples) {
  for (double d : {0.0, 0.1, 0.25, 0.4, 0.5}) {
    const auto [l1, l2] = eve_eigenvalues_closed_form({d, 0.5, 0.5});
    EXPECT_NEAR(l1, 1 - d, kTol);
    EXPECT_NEAR(l2, d, kTol);
    const auto [u1, u2] = eve_eigenvalues_closed_form({d, 1.0, 0.0});
    EXPECT_NEAR(u1, 1.0, kTol);
    EXPECT_NEAR(u2, 0.0, kTol);
  }
  const auto [z1, z2] = eve_eigenvalues_closed_form({0.0, 0.3, 0.7});
  EXPECT_EQ(z1, 1.0);
  EXPECT_EQ(z2, 0.0);
}

TEST(EveEigenvalues, ClosedFormMatchesNumericOnGrid) {
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      const double d = 0.05 * i, p0 = 0.1 * j;
      const EveModelParams params{d, p0, 1 - p0};
      const auto [l1, l2] = eve_eigenvalues_closed_form(params);
      const auto numeric = hermitian_eigenvalues(eve_encoded_density(params));
      EXPECT_NEAR(l1, numeric[0], kTol) << d << "," << p0;
      EXPECT_NEAR(l2, numeric[1], kTol) << d << "," << p0;
      EXPECT_NEAR(l1 + l2, 1.0, kTol);
      const auto ref = pingpong::testing::reference_eigenvalues(eve_encoded_density(params).matrix());
      EXPECT_NEAR(l1, ref[0], 1e-10);
      EXPECT_NEAR(l2, ref[1], 1e-10);
    }
}

TEST(EveEigenvalues, EntropyEqualsBinaryEntropyForEqualPriors) {
  for (int i = 0; i <= 10; ++i) {
    const double d = 0.05 * i;
    EXPECT_NEAR(von_neumann_entropy(eve_encoded_density({d, 0.5, 0.5})).value(), binary_entropy(d).value(), kTol);
  }
}

// ---------- information bound ----------
TEST(EveInformationBound, Examples) {
  EXPECT_EQ(eve_information_bound(0.0).value(), 0.0);
  EXPECT_EQ(eve_information_bound(0.5).value(), 1.0);
  EXPECT_NEAR(eve_information_bound(0.1).value(), 0.468996, 1e-6);
  EXPECT_NEAR(eve_information_bound(0.1).value(), h2(0.1), kTol);
  EXPECT_THROW(eve_information_bound(1.5), PreconditionError);
}

// ---------- survival ----------
TEST(SurvivalProbability, Examples) {
  for (double c : {0.1, 0.5, 0.9})
    for (std::uint64_t n : {1u, 10u, 1000u}) EXPECT_EQ(survival_probability({c, 0.0, n}), 1.0);
  EXPECT_NEAR(survival_probability({0.5, 0.5, 1}), 0.5625, kTol);
  EXPECT_NEAR(survival_probability({0.5, 0.5, 2}), 0.31640625, kTol);
  EXPECT_NEAR(survival_probability({0.5, 0.5, 3}), 0.177978515625, kTol);
}

TEST(SurvivalProbability, Validation) {
  EXPECT_THROW(survival_probability({0.0, 0.1, 1}), PreconditionError);
  EXPECT_THROW(survival_probability({1.0, 0.1, 1}), PreconditionError);
  EXPECT_THROW(survival_probability({0.5, 0.6, 1}), PreconditionError);
  EXPECT_THROW(survival_probability({0.5, -0.1, 1}), PreconditionError);
  EXPECT_THROW(survival_probability({0.5, 0.1, 0}), PreconditionError);
}

TEST(SurvivalProbability, StrictlyDecreasingInEachArgument) {
  Generator gen(113);
  for (int i = 0; i < 500; ++i) {
    const double c = gen.uniform(0.05, 0.9), d = gen.uniform(0.01, 0.45);
    const auto n = static_cast<std::uint64_t>(gen.uniform(1, 50));
    const double base = survival_probability({c, d, n});
    EXPECT_GT(base, 0.0);
    EXPECT_LE(base, 1.0);
    EXPECT_LT(survival_probability({c, d, n + 1}), base);
    EXPECT_LT(survival_probability({c, d + 0.04, n}), base);
    EXPECT_LT(survival_probability({c + 0.05, d, n}), base);
  }
}

TEST(SurvivalProbability, LogIsLinearInN) {
  Generator gen(127);
  for (int i = 0; i < 200; ++i) {
    const double c = gen.uniform(0.05, 0.95), d = gen.uniform(0.01, 0.5);
    const double slope = std::log1p(-c * d) / (1 - c);
    for (std::uint64_t n = 1; n <= 20; ++n)
      EXPECT_NEAR(std::log(survival_probability({c, d, n})), slope * static_cast<double>(n), 1e-12 * n);
  }
}
