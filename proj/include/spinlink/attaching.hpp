#pragma once

// "Attach a qubit" baselines: the sender's pure state
// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> sits on site 1, the rest of a
// uniform chain is in a reference state, and the receiver reads site N after
// free evolution.
//   FM:  H = -J sum sigma.sigma, sites 2..N all |1> (ferromagnetic vacuum)
//   AFM: H = +J sum sigma.sigma, sites 2..N in the ground state of the
//        uniform (N-1)-site chain (Sz = +1 member of the doublet when N-1 is
//        odd; a lone spin is taken as |0>)
// The fidelity is read from site N's reduced state, optionally after the
// receiver's best fixed phase rotation diag(1, e^{i a}) (the usual field
// compensation of the FM protocol). t* is the first arrival: the first local
// maximum of F_av(t) above the classical threshold 2/3.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spinlink/initial.hpp"
#include "spinlink/krylov.hpp"
#include "spinlink/lanczos.hpp"
#include "spinlink/sphere.hpp"
#include "spinlink/timeseries.hpp"

namespace spinlink {

enum class AttachScheme { FM, AFM };

inline std::string to_string(AttachScheme s) { return s == AttachScheme::FM ? "FM" : "AFM"; }

inline ChainSpec attaching_chain(AttachScheme scheme, int n) {
  return {n, 0.0, 1.0, scheme == AttachScheme::FM ? CouplingPattern::UniformFM : CouplingPattern::UniformAFM};
}

/// Reference state of sites 2..N, as an (N-1)-qubit state. `residual`
/// receives the eigen-residual of the subchain solve (0 for exact states).
inline StateVector attaching_reference(AttachScheme scheme, int n, double gs_tol = 1e-10,
                                       double* residual = nullptr) {
  require(n >= 2, "attaching needs at least two sites");
  if (residual) *residual = 0.0;
  const int m = n - 1;
  if (scheme == AttachScheme::FM) return StateVector::basis_state(m, full_dimension(m) - 1);
  if (m == 1) return StateVector::basis_state(1, 0);
  const auto sub = build_chain({m, 0.0, 1.0, CouplingPattern::UniformAFM});
  auto gs = ground_state(sub, gs_tol);
  if (residual) *residual = gs.residual;
  return std::move(gs.state);
}

inline Eigen::Vector2cd sender_state(double theta, double phi) {
  return {std::cos(theta / 2.0), std::exp(kI * phi) * std::sin(theta / 2.0)};
}

inline StateVector attach_initial_state(AttachScheme scheme, int n, double theta, double phi) {
  return prepend_qubit(sender_state(theta, phi), attaching_reference(scheme, n));
}

/// One-site analogue of cross_reduced: Tr_rest |a><b| on `site`.
inline Matrix2c cross_reduced_site(const StateVector& a, const StateVector& b, int site) {
  const BasisState m = site_mask(site);
  Matrix2c out = Matrix2c::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Complex{}) continue;
    const BasisState s = a.basis_state_at(i);
    const int row = (s & m) ? 1 : 0;
    const BasisState rest = s & ~m;
    for (int col = 0; col < 2; ++col) {
      const auto j = b.position_of(rest | (col ? m : 0));
      if (j >= 0) out(row, col) += a[i] * std::conj(b[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

enum class PhaseCorrection { None, Optimal };

inline PhaseCorrection default_correction(AttachScheme s) {
  return s == AttachScheme::FM ? PhaseCorrection::Optimal : PhaseCorrection::None;
}

/// Site-N blocks for the two sender basis inputs |0>|ref> and |1>|ref>.
struct SiteCrossTerms {
  std::array<std::array<Matrix2c, 2>, 2> block;

  Matrix2c site_state(double theta, double phi) const {
    const Eigen::Vector2cd w = sender_state(theta, phi);
    Matrix2c rho = Matrix2c::Zero();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        rho += w(static_cast<Eigen::Index>(i)) * std::conj(w(static_cast<Eigen::Index>(j))) * block[i][j];
    return rho;
  }

  /// Average fidelity after the receiver applies diag(1, e^{i alpha}).
  double average_fidelity(const SphereRule& rule, double alpha = 0.0) const {
    const Complex ph = std::exp(kI * alpha);
    return rule.average([&](double th, double ph_in) {
      const Eigen::Vector2cd in = sender_state(th, ph_in);
      Matrix2c rho = site_state(th, ph_in);
      rho(1, 0) *= ph;
      rho(0, 1) *= std::conj(ph);
      return in.dot(rho * in).real();
    });
  }

  /// F(alpha) = A + X cos(alpha) + Y sin(alpha), maximised in closed form.
  double corrected_average_fidelity(const SphereRule& rule) const {
    const double f0 = average_fidelity(rule, 0.0);
    const double fq = average_fidelity(rule, 0.5 * kPi);
    const double fp = average_fidelity(rule, kPi);
    const double a = 0.5 * (f0 + fp);
    return a + std::hypot(0.5 * (f0 - fp), fq - a);
  }
};

inline SiteCrossTerms site_cross_terms(const StateVector& s0, const StateVector& s1, int site) {
  SiteCrossTerms terms;
  terms.block[0][0] = cross_reduced_site(s0, s0, site);
  terms.block[0][1] = cross_reduced_site(s0, s1, site);
  terms.block[1][0] = terms.block[0][1].adjoint();
  terms.block[1][1] = cross_reduced_site(s1, s1, site);
  return terms;
}

struct AttachingOptions {
  PropagatorConfig propagator;
  SphereRule rule{16, 32};
  double gs_tol = 1e-10;
  /// Unset: the scheme's default (optimal phase for FM, none for AFM).
  std::optional<PhaseCorrection> correction;
  /// First-arrival threshold for t*.
  double arrival_threshold = 2.0 / 3.0;
};

struct AttachingResult {
  AttachScheme scheme;
  int n_qubits;
  TimeSeries average_fidelity;
  OptimalTime peak;
  ConservationLog conservation;
  double reference_residual = 0.0;
};

inline AttachingResult run_attaching(AttachScheme scheme, int n, std::span<const double> grid,
                                     const AttachingOptions& opts = {}) {
  require(!grid.empty(), "attaching baseline needs a non-empty time grid");
  const auto h = build_chain(attaching_chain(scheme, n));
  double residual = 0.0;
  const auto ref = attaching_reference(scheme, n, opts.gs_tol, &residual);
  const bool correct = opts.correction.value_or(default_correction(scheme)) == PhaseCorrection::Optimal;
  const StateVector in0 = prepend_qubit(Eigen::Vector2cd(1.0, 0.0), ref);
  const StateVector in1 = prepend_qubit(Eigen::Vector2cd(0.0, 1.0), ref);
  Evolution ev0(h, in0, opts.propagator);
  Evolution ev1(h, in1, opts.propagator);
  const double en0 = h.expectation(in0), en1 = h.expectation(in1);

  AttachingResult r{scheme, n, {"F_av_" + to_string(scheme), {grid.begin(), grid.end()}, {}, {}}, {}, {}, residual};
  for (double t : grid) {
    ev0.advance_to(t);
    ev1.advance_to(t);
    const StateVector s0 = ev0.state(), s1 = ev1.state();
    const auto terms = site_cross_terms(s0, s1, n);
    r.average_fidelity.value.push_back(correct ? terms.corrected_average_fidelity(opts.rule)
                                               : terms.average_fidelity(opts.rule));
    r.conservation.norm_drift =
        std::max({r.conservation.norm_drift, std::abs(s0.norm() - 1.0), std::abs(s1.norm() - 1.0)});
    r.conservation.energy_drift = std::max(
        {r.conservation.energy_drift, std::abs(h.expectation(s0) - en0), std::abs(h.expectation(s1) - en1)});
  }
  r.peak = find_first_peak(r.average_fidelity, opts.arrival_threshold);
  return r;
}

inline double attaching_average_fidelity(AttachScheme scheme, int n, double t,
                                         const AttachingOptions& opts = {}) {
  const std::array<double, 1> grid{t};
  return run_attaching(scheme, n, grid, opts).average_fidelity.value[0];
}

/// Transfer amplitude of a single up spin from site 1 to site N in the FM
/// vacuum, relative to the vacuum phase.
inline Complex fm_transfer_amplitude(int n, double t, double coupling = 1.0) {
  require(n >= 2, "attaching needs at least two sites");
  // One-magnon block minus the vacuum energy. Each bond -J sigma.sigma
  // contributes +2J to the diagonal of both sites it touches and -2J hopping.
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b + 1 < n; ++b) {
    h1(b, b) += 2.0 * coupling;
    h1(b + 1, b + 1) += 2.0 * coupling;
    h1(b, b + 1) -= 2.0 * coupling;
    h1(b + 1, b) -= 2.0 * coupling;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h1);
  Complex g{};
  for (int k = 0; k < n; ++k)
    g += es.eigenvectors()(n - 1, k) * std::exp(-kI * es.eigenvalues()(k) * t) * es.eigenvectors()(0, k);
  return g;
}

/// FM baseline in closed form: F_av = 1/2 + Re(g)/3 + |g|^2/6, with Re(g)
/// replaced by |g| under the optimal phase correction.
inline double fm_single_excitation_fidelity(int n, double t, PhaseCorrection c = PhaseCorrection::Optimal,
                                            double coupling = 1.0) {
  const Complex g = fm_transfer_amplitude(n, t, coupling);
  const double lin = c == PhaseCorrection::Optimal ? std::abs(g) : g.real();
  return 0.5 + lin / 3.0 + std::norm(g) / 6.0;
}

struct StrategyRow {
  int n;
  OptimalTime fm;
  OptimalTime afm;
  OptimalTime measurement;
  /// F_av^M > AFM > FM at this N.
  bool ordered;
};

inline bool strategy_ordering(double measurement, double afm, double fm) {
  return measurement > afm && afm > fm;
}

}  // namespace spinlink
