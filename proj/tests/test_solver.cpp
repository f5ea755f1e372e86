#include <gtest/gtest.h>

#include <random>

#include "oracle/dense.hpp"
#include "spinlink/krylov.hpp"
#include "spinlink/lanczos.hpp"
#include "test_util.hpp"

using namespace spinlink;

TEST(GroundState, TwoSitesIsSinglet) {
  for (double delta : {0.0, 0.3, 0.9}) {
    const auto gs = ground_state(build_chain(dimerized_chain(2, delta)));
    EXPECT_NEAR(gs.energy, -3.0 * (1.0 + delta), 1e-12);
    EXPECT_NEAR(state_fidelity(partial_trace(gs.state, {1, 2}), singlet()), 1.0, 1e-12);
  }
}

TEST(GroundState, DecoupledDimersGiveSingletProduct) {
  const auto gs = ground_state(build_chain(dimerized_chain(4, 1.0)));
  EXPECT_NEAR(gs.energy, -12.0, 1e-10);
  EXPECT_NEAR(state_fidelity(partial_trace(gs.state, {1, 2}), singlet()), 1.0, 1e-10);
  EXPECT_NEAR(state_fidelity(partial_trace(gs.state, {3, 4}), singlet()), 1.0, 1e-10);
}

TEST(GroundState, FullDimerizationEnergyFormula) {
  for (int n : {6, 8, 10}) {
    const auto gs = ground_state(build_chain(dimerized_chain(n, 1.0)));
    EXPECT_NEAR(gs.energy, -3.0 * 2.0 * (n / 2), 1e-9);
  }
}

TEST(GroundState, MatchesDenseDiagonalization) {
  const int n = 8;
  const auto sp = oracle::diagonalize(oracle::heisenberg(n, oracle::dimer_bonds(n, 0.7)));
  const auto gs = ground_state(build_chain(dimerized_chain(n, 0.7)), 1e-10);
  EXPECT_NEAR(gs.energy, sp.energies(0), 1e-9);
  EXPECT_LT(gs.residual, 1e-10);
  EXPECT_LT(testutil::phase_free_distance(testutil::to_dense(gs.state), oracle::ground_vector(sp)), 1e-9);
  EXPECT_NEAR(gs.gap, sp.energies(1) - sp.energies(0), 1e-6);
  EXPECT_EQ(gs.state.sector(), 0);
}

TEST(GroundState, DeterministicAcrossCalls) {
  const auto h = build_chain(dimerized_chain(10, 0.4));
  const auto a = ground_state(h);
  const auto b = ground_state(h);
  EXPECT_EQ(a.state.amplitudes(), b.state.amplitudes());
}

TEST(GroundState, DegenerateSectorIsRejected) {
  // Decoupled dimers, one flipped spin: singlet x triplet on either pair.
  const auto h = build_chain(dimerized_chain(4, 1.0));
  LanczosOptions opts;
  opts.sector = 2;
  EXPECT_THROW(ground_state(h, 1e-10, opts), Error);
}

TEST(GroundState, NonConvergenceReportsResidual) {
  const auto h = build_chain(dimerized_chain(12, 0.7));
  LanczosOptions opts;
  opts.max_basis = 3;
  opts.max_restarts = 2;
  try {
    ground_state(h, 1e-12, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.achieved(), 1e-12);
  }
}

namespace {

struct EvolutionFixture : ::testing::Test {
  static constexpr int n = 8;
  Hamiltonian h = build_chain(dimerized_chain(n, 0.7));
  oracle::Spectrum sp = oracle::diagonalize(oracle::heisenberg(n, oracle::dimer_bonds(n, 0.7)));
  StateVector gs = ground_state(h).state;
};

}  // namespace

TEST_F(EvolutionFixture, ZeroTimeReturnsInput) {
  const auto psi = apply_pauli(gs, 1, Pauli::X);
  const auto out = evolve(h, psi, 0.0);
  EXPECT_EQ(out.amplitudes(), psi.amplitudes());
}

TEST_F(EvolutionFixture, EigenstateOnlyAcquiresPhase) {
  const double e0 = ground_state(h).energy;
  for (double t : {0.5, 3.0, 17.25}) {
    const auto out = evolve(h, gs, t);
    const Complex ov = inner(gs, out);
    EXPECT_NEAR(std::norm(ov), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(ov - std::exp(-kI * e0 * t)), 0.0, 1e-8);
  }
}

TEST_F(EvolutionFixture, MatchesDenseExponential) {
  const auto psi = apply_pauli(gs, 1, Pauli::X);
  const auto out = evolve(h, psi, 5.0);
  const auto ref = oracle::expm_apply(sp, testutil::to_dense(psi), 5.0);
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(out), ref), 1e-8);
}

TEST_F(EvolutionFixture, NormAndEnergyConservedToLongTimes) {
  const auto psi = apply_rotation(gs, 1, 1.1, 0.4);
  const double e_in = h.expectation(psi);
  const std::vector<double> grid{1.0, 10.0, 50.0, 120.0, 200.0};
  evolve_visit(h, psi, grid, {}, [&](std::size_t, double, const StateVector& s) {
    EXPECT_NEAR(s.norm(), 1.0, 1e-10);
    EXPECT_NEAR(h.expectation(s), e_in, 1e-8);
  });
}

TEST_F(EvolutionFixture, CompositionOfEvolutions) {
  const auto psi = apply_pauli(gs, 1, Pauli::Y);
  const auto two_step = evolve(h, evolve(h, psi, 1.3), 2.45);
  const auto one_step = evolve(h, psi, 3.75);
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(two_step), testutil::to_dense(one_step)), 1e-8);
}

TEST_F(EvolutionFixture, SectorSplitMatchesFullSpace) {
  const auto psi = apply_pauli(gs, 1, Pauli::X);  // spans sz = +2 and -2
  PropagatorConfig full_cfg;
  full_cfg.split_sectors = false;
  const auto split = evolve(h, psi, 4.0);
  const auto whole = evolve(h, psi, 4.0, full_cfg);
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(split), testutil::to_dense(whole)), 1e-8);
  // Sector-restricted input stays sector-restricted.
  const auto lowered = apply_pauli(gs, 1, Pauli::Minus);
  const auto out = evolve(h, lowered, 4.0);
  ASSERT_EQ(out.sector(), -2);
  const auto ref = oracle::expm_apply(sp, testutil::to_dense(lowered), 4.0);
  EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(out), ref), 1e-8);
}

TEST_F(EvolutionFixture, SeriesMatchesIndependentCalls) {
  const auto psi = apply_pauli(gs, 1, Pauli::Z);
  const std::vector<double> grid{2.0, 4.0};
  const auto series = evolve_series(h, psi, grid);
  ASSERT_EQ(series.size(), 2u);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto single = evolve(h, psi, grid[k]);
    EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(series[k]), testutil::to_dense(single)), 1e-9);
  }
  const std::vector<double> zero{0.0};
  EXPECT_EQ(evolve_series(h, psi, zero)[0].amplitudes(), psi.amplitudes());
  const std::vector<double> repeated{1.5, 1.5};
  const auto rep = evolve_series(h, psi, repeated);
  EXPECT_EQ(rep[0].amplitudes(), rep[1].amplitudes());
}

TEST_F(EvolutionFixture, RejectsBadInputs) {
  EXPECT_THROW(evolve(h, gs, -1.0), Error);
  const std::vector<double> descending{2.0, 1.0};
  EXPECT_THROW(evolve_series(h, gs, descending), Error);
  PropagatorConfig bad;
  bad.krylov_dim = 1;
  EXPECT_THROW(evolve(h, gs, 1.0, bad), Error);
}

TEST_F(EvolutionFixture, RandomTimesAgreeWithOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> when(0.0, 24.0);
  const auto psi = apply_rotation(gs, 1, 0.9, 2.3);
  for (int k = 0; k < 20; ++k) {
    const double t = when(rng);
    const auto out = evolve(h, psi, t);
    EXPECT_LT(testutil::max_abs_diff(testutil::to_dense(out), oracle::expm_apply(sp, testutil::to_dense(psi), t)), 1e-8)
        << "t=" << t;
  }
}
