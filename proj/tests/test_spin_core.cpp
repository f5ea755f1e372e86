#include <gtest/gtest.h>

#include <cmath>

#include "oracle/dense.hpp"
#include "spinlink/density.hpp"
#include "spinlink/lanczos.hpp"
#include "spinlink/state.hpp"
#include "test_util.hpp"

using namespace spinlink;

namespace {

oracle::Vec dense_gs(int n, double delta) {
  return oracle::ground_vector(oracle::diagonalize(oracle::heisenberg(n, oracle::dimer_bonds(n, delta))));
}

double oracle_werner_p(int n, double delta) {
  const auto rho = oracle::reduced_pair(n, dense_gs(n, delta), 1, 2);
  const VectorXc s = singlet();
  return (4.0 * s.dot(rho * s).real() - 1.0) / 3.0;
}

}  // namespace

TEST(ApplyPauli, SigmaZKeepsUpState) {
  const auto up = StateVector::basis_state(1, 0);
  const auto out = apply_pauli(up, 1, Pauli::Z);
  EXPECT_NEAR(std::abs(out[0] - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[1]), 0.0, 1e-15);
}

TEST(ApplyPauli, SigmaXIsAnInvolution) {
  const auto psi = testutil::random_state(5, 11);
  for (int site = 1; site <= 5; ++site) {
    const auto back = apply_pauli(apply_pauli(psi, site, Pauli::X), site, Pauli::X);
    EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(back), testutil::to_dense(psi)), 1e-14);
  }
}

TEST(ApplyPauli, EncodedGroundStateCarriesBellWeight) {
  const int n = 4;
  const double p = oracle_werner_p(n, 0.7);
  const auto gs = ground_state(build_chain(dimerized_chain(n, 0.7))).state;
  const auto rho = partial_trace(apply_pauli(gs, 1, Pauli::X), {1, 2});
  EXPECT_NEAR(state_fidelity(rho, bell_state(BellLabel::X)), (3.0 * p + 1.0) / 4.0, 1e-10);
}

TEST(ApplyPauli, LadderOperatorsMoveBetweenSectors) {
  const auto sec = make_sector(6, 0);
  const auto psi = testutil::random_sector_state(sec, 3);
  for (Pauli axis : {Pauli::Plus, Pauli::Minus, Pauli::Z}) {
    const auto moved = apply_pauli(psi, 2, axis);
    const auto reference = apply_pauli(psi.to_full(), 2, axis);
    EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(moved), testutil::to_dense(reference)), 1e-15);
    ASSERT_TRUE(moved.sector().has_value());
    const int expected = axis == Pauli::Plus ? 2 : axis == Pauli::Minus ? -2 : 0;
    EXPECT_EQ(*moved.sector(), expected);
  }
  // sigma^x leaves the sector and is promoted to the full basis.
  EXPECT_TRUE(apply_pauli(psi, 2, Pauli::X).is_full());
}

TEST(ApplyPauli, RejectsSiteOutOfRange) {
  const auto psi = testutil::random_state(3, 1);
  EXPECT_THROW(apply_pauli(psi, 0, Pauli::X), Error);
  EXPECT_THROW(apply_pauli(psi, 4, Pauli::Z), Error);
  EXPECT_THROW(apply_rotation(psi, 4, 0.1, 0.2), Error);
}

TEST(ApplyRotation, ZeroAngleIsIdentity) {
  const auto psi = testutil::random_state(4, 7);
  const auto out = apply_rotation(psi, 1, 0.0, 1.234);
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(out), testutil::to_dense(psi)), 1e-14);
}

TEST(ApplyRotation, PiRotationFlipsUpToDown) {
  const auto out = apply_rotation(StateVector::basis_state(1, 0), 1, kPi, 0.0);
  EXPECT_NEAR(std::abs(out[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[1] - Complex(1.0)), 0.0, 1e-15);
}

TEST(ApplyRotation, InverseRestoresState) {
  const auto psi = testutil::random_state(5, 8);
  const Matrix2c r = rotation_matrix(0.7, 2.1);
  const auto there = apply_local(psi, 3, r);
  const auto back = apply_local(there, 3, r.adjoint());
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(back), testutil::to_dense(psi)), 1e-12);
  EXPECT_NEAR(there.norm(), 1.0, 1e-12);
}

TEST(PartialTrace, ProductStateMarginalIsPure) {
  // |01>: site 1 up (bit 0), site 2 down (bit 1).
  const auto psi = StateVector::basis_state(2, 0b10);
  const auto rho = partial_trace(psi, {1});
  EXPECT_NEAR(std::abs(rho(0, 0) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(rho.matrix().cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(PartialTrace, SingletMarginalIsMaximallyMixed) {
  ComplexVec a(4);
  a[0b10] = 1.0 / std::sqrt(2.0);
  a[0b01] = -1.0 / std::sqrt(2.0);
  const StateVector psi(2, a);
  for (int site : {1, 2}) {
    const auto rho = partial_trace(psi, {site});
    EXPECT_LT((rho.matrix() - MatrixXc::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-14);
  }
  // The pair itself is the singlet in the documented (first site = high bit) order.
  const auto pair = partial_trace(psi, {1, 2});
  EXPECT_NEAR(state_fidelity(pair, singlet()), 1.0, 1e-14);
}

TEST(PartialTrace, GroundStatePairIsWernerWithOracleWeight) {
  const auto gs = ground_state(build_chain(dimerized_chain(4, 0.7))).state;
  const auto fit = werner_p(partial_trace(gs, {1, 2}));
  EXPECT_NEAR(fit.p, oracle_werner_p(4, 0.7), 1e-10);
  EXPECT_LT(fit.distance, 1e-8);
}

TEST(PartialTrace, MatchesDenseReduction) {
  const auto psi = testutil::random_state(6, 21);
  const auto rho = partial_trace(psi, {5, 2});
  const auto ref = oracle::reduced_pair(6, testutil::to_dense(psi), 5, 2);
  EXPECT_LT((rho.matrix() - ref).cwiseAbs().maxCoeff(), 1e-14);
  // Sector-restricted input takes the same path through position lookups.
  const auto sec = make_sector(6, 2);
  const auto ps = testutil::random_sector_state(sec, 5);
  const auto ref2 = oracle::reduced_pair(6, testutil::to_dense(ps), 5, 6);
  EXPECT_LT((partial_trace(ps, {5, 6}).matrix() - ref2).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PartialTrace, RejectsBadSiteLists) {
  const auto psi = testutil::random_state(4, 2);
  EXPECT_THROW(partial_trace(psi, {1, 1}), Error);
  EXPECT_THROW(partial_trace(psi, {1, 2, 3}), Error);
  EXPECT_THROW(partial_trace(psi, {0}), Error);
}

TEST(PartialTrace, RandomStatesGiveValidDensityMatrices) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int n = 2 + static_cast<int>(seed % 6);
    const auto psi = testutil::random_state(n, seed);
    const int a = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n));
    const int b = 1 + static_cast<int>((seed + 1) % static_cast<std::uint64_t>(n));
    const auto rho = partial_trace(psi, {a, b});
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_GE(rho.min_eigenvalue(), -1e-12);
    const double s = von_neumann_entropy(rho);
    EXPECT_GE(s, -1e-12);
    EXPECT_LE(s, 2.0 + 1e-12);
  }
}

TEST(StateFidelity, ReferenceValues) {
  EXPECT_NEAR(state_fidelity(pure_density(singlet()), singlet()), 1.0, 1e-15);
  for (BellLabel a : kBellLabels)
    EXPECT_NEAR(state_fidelity(maximally_mixed(4), bell_state(a)), 0.25, 1e-15);
  EXPECT_NEAR(state_fidelity(werner_state(0.9), singlet()), 0.925, 1e-15);
}

TEST(StateFidelity, DimensionMismatchThrows) {
  EXPECT_THROW(state_fidelity(maximally_mixed(4), VectorXc::Zero(2)), Error);
}

TEST(Entropy, ReferenceValues) {
  EXPECT_NEAR(von_neumann_entropy(pure_density(bell_state(BellLabel::Y))), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(maximally_mixed(4)), 2.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(maximally_mixed(2)), 1.0, 1e-14);
}

TEST(Entropy, WernerClosedForm) {
  const double p = 0.9;
  const double big = (1.0 + 3.0 * p) / 4.0;
  const double small = (1.0 - p) / 4.0;
  const double expected = -big * std::log2(big) - 3.0 * small * std::log2(small);
  EXPECT_NEAR(von_neumann_entropy(werner_state(p)), expected, 1e-12);
}

TEST(DensityMatrix, RejectsInvalidInput) {
  MatrixXc m = MatrixXc::Zero(4, 4);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{m}, Error);
  EXPECT_THROW(DensityMatrix{MatrixXc::Identity(3, 3) / 3.0}, Error);
  MatrixXc nonherm = MatrixXc::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{nonherm}, Error);
}

TEST(WernerP, ExtremeCases) {
  const auto pure = werner_p(pure_density(singlet()));
  EXPECT_NEAR(pure.p, 1.0, 1e-14);
  EXPECT_LT(pure.distance, 1e-14);
  const auto mixed = werner_p(maximally_mixed(4));
  EXPECT_NEAR(mixed.p, 0.0, 1e-14);
  EXPECT_LT(mixed.distance, 1e-14);
  // A non-Werner state is flagged through the distance.
  EXPECT_GT(werner_p(pure_density(bell_state(BellLabel::X))).distance, 0.5);
}

TEST(WernerP, DimerizedGroundStateIsNearlyPureSinglet) {
  const int n = 8;
  const auto gs = ground_state(build_chain(dimerized_chain(n, 0.7))).state;
  const auto fit = werner_p(partial_trace(gs, {1, 2}));
  EXPECT_NEAR(fit.p, oracle_werner_p(n, 0.7), 1e-9);
  EXPECT_GT(fit.p, 0.99);
  EXPECT_LT(fit.distance, 1e-8);
}

TEST(BellStates, AreOrthonormal) {
  for (BellLabel a : kBellLabels)
    for (BellLabel b : kBellLabels) {
      const Complex ov = bell_state(a).dot(bell_state(b));
      EXPECT_NEAR(std::abs(ov - Complex(a == b ? 1.0 : 0.0)), 0.0, 1e-14);
    }
}

TEST(Unitarity, RandomOperatorSequencesPreserveNorm) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  auto psi = testutil::random_state(7, 4);
  for (int step = 0; step < 200; ++step) {
    const int site = 1 + static_cast<int>(rng() % 7);
    switch (rng() % 4) {
      case 0: psi = apply_pauli(psi, site, Pauli::X); break;
      case 1: psi = apply_pauli(psi, site, Pauli::Y); break;
      case 2: psi = apply_pauli(psi, site, Pauli::Z); break;
      default: psi = apply_rotation(psi, site, angle(rng), angle(rng));
    }
  }
  EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
}

TEST(Holevo, FourOrthogonalBellOutputsGiveTwoBits) {
  std::vector<DensityMatrix> outs;
  for (BellLabel a : kBellLabels) outs.push_back(pure_density(bell_state(a)));
  const std::vector<double> q(4, 0.25);
  EXPECT_NEAR(holevo_information(outs, q), 2.0, 1e-12);
  const std::vector<double> degenerate{1.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(holevo_information(outs, degenerate), 0.0, 1e-12);
}
