#pragma once

// Remote-state-preparation-like transfer. The sender rotates site 1 by
// R(theta, phi); after evolution the receiver measures site N-1 in the
// computational basis, leaving site N in (ideally) the state
//   outcome 0: |psi_0> = cos(theta/2)|1> + sin(theta/2) e^{-i phi}|0>
//   outcome 1: |psi_1> = cos(theta/2)|0> - sin(theta/2) e^{+i phi}|1>
// The measurement fidelity is
//   F^M = sum_k <k, psi_k| rho_{N-1,N} |k, psi_k>,
// where each term already carries the outcome probability p_k (it equals
// p_k times the conditional fidelity), so no extra p_k factor is applied.
// This is the reading under which an ideal channel gives F^M = 1 and the
// Bloch-sphere average reduces to
//   F_av = 1/2 + (F2 - F1)/12 + 2 F3/3
// with F1 = <Z_{N-1} Z_N>, F2 = 2 <s+_1 Z_{N-1}(t) Z_N(t) s-_1>,
// F3 = Re <s+_1 Z_{N-1}(t) s-_N(t)>, all in the initial state.

#include <array>
#include <cmath>
#include <vector>

#include "spinlink/density.hpp"
#include "spinlink/fit.hpp"
#include "spinlink/initial.hpp"
#include "spinlink/krylov.hpp"
#include "spinlink/sphere.hpp"
#include "spinlink/timeseries.hpp"

namespace spinlink {

inline StateVector encode_quantum(const StateVector& gs, double theta, double phi) {
  return apply_rotation(gs, 1, theta, phi);
}

/// |k, psi_k> for k = 0, 1 in the pair basis (site N-1 most significant).
inline std::array<VectorXc, 2> measurement_targets(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  VectorXc t0 = VectorXc::Zero(4), t1 = VectorXc::Zero(4);
  t0(0) = s * std::exp(-kI * phi);  // |0>_{N-1} |0>_N
  t0(1) = c;                        // |0>_{N-1} |1>_N
  t1(2) = c;                        // |1>_{N-1} |0>_N
  t1(3) = -s * std::exp(kI * phi);  // |1>_{N-1} |1>_N
  return {t0, t1};
}

inline double measurement_fidelity(const MatrixXc& pair, double theta, double phi) {
  const auto targets = measurement_targets(theta, phi);
  double f = 0.0;
  for (const auto& v : targets) f += v.dot(pair * v).real();
  return f;
}

inline double measurement_fidelity(const DensityMatrix& pair, double theta, double phi) {
  require(pair.dim() == 4, "measurement fidelity needs the receiver pair state");
  return measurement_fidelity(pair.matrix(), theta, phi);
}

/// Evolves R(theta, phi)|initial> directly and evaluates F^M at time t.
inline double measurement_fidelity(const Hamiltonian& h, const StateVector& initial, double theta,
                                   double phi, double t, const PropagatorConfig& cfg = {}) {
  const int n = h.n_qubits();
  const auto out = evolve(h, encode_quantum(initial, theta, phi), t, cfg);
  return measurement_fidelity(partial_trace(out, {n - 1, n}), theta, phi);
}

/// Tr_rest |v_i(t)><v_j(t)| on (N-1, N) for v = (psi, s-_1 psi, s+_1 psi).
/// R(theta, phi) = cos(theta/2) I + sin(theta/2)(e^{i phi} s- - e^{-i phi} s+),
/// so every encoded pair state is a quadratic form in these nine blocks.
struct PairCrossTerms {
  std::array<std::array<Matrix4c, 3>, 3> block;

  MatrixXc pair_state(double theta, double phi) const {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const std::array<Complex, 3> w{c, s * std::exp(kI * phi), -s * std::exp(-kI * phi)};
    Matrix4c rho = Matrix4c::Zero();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) rho += w[i] * std::conj(w[j]) * block[i][j];
    return rho;
  }
};

inline PairCrossTerms pair_cross_terms(const std::array<const StateVector*, 3>& v) {
  const int n = v[0]->n_qubits();
  PairCrossTerms out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      out.block[i][j] = cross_reduced(*v[i], *v[j], n - 1, n);
      if (i != j) out.block[j][i] = out.block[i][j].adjoint();
    }
  return out;
}

struct QuadratureEstimate {
  double value;
  /// |rule - half-resolution rule|
  double error;
};

inline QuadratureEstimate average_measurement_fidelity(const PairCrossTerms& terms, const SphereRule& rule) {
  auto f = [&](double th, double ph) { return measurement_fidelity(terms.pair_state(th, ph), th, ph); };
  const double fine = rule.average(f);
  const double coarse = rule.coarse().average(f);
  return {fine, std::abs(fine - coarse)};
}

struct Correlators {
  double f1;
  double f2;
  double f3;
  /// Imaginary residue of the F2 expectation (should vanish).
  double f2_imag = 0.0;

  double average_fidelity() const { return 0.5 + (f2 - f1) / 12.0 + 2.0 * f3 / 3.0; }
};

namespace detail {

/// <a| Z_{N-1} Z_N |b>
inline Complex zz_matrix_element(const StateVector& a, const StateVector& b) {
  const int n = a.n_qubits();
  const BasisState m1 = site_mask(n - 1), m2 = site_mask(n);
  Complex acc{};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const BasisState s = b.basis_state_at(i);
    const double z = (((s & m1) != 0) == ((s & m2) != 0)) ? 1.0 : -1.0;
    acc += std::conj(a.amplitude(s)) * z * b[i];
  }
  return acc;
}

/// Z_{N-1} s-_N |psi>
inline StateVector z_lower_receiver(const Hamiltonian& h, const StateVector& psi) {
  const int n = h.n_qubits();
  SectorPtr target = psi.sector() ? h.sector(*psi.sector() - 2) : nullptr;
  return apply_pauli(apply_pauli(psi, n, Pauli::Minus, target), n - 1, Pauli::Z);
}

}  // namespace detail

struct QuantumOptions {
  PropagatorConfig propagator;
  SphereRule rule{16, 32};
  /// Also evaluate the Bloch-sphere quadrature at every grid point.
  bool quadrature = false;
  bool track_conservation = true;
  /// Also sample F^M on the rule's nodes at the peak (three extra evolutions).
  bool peak_samples = false;
};

struct QuantumProtocolResult {
  TimeSeries average_fidelity;             // analytic correlator route
  TimeSeries quadrature_fidelity;          // empty unless requested
  TimeSeries quadrature_error;             // empty unless requested
  TimeSeries f1, f2, f3;
  OptimalTime peak;
  /// F^M on the rule's nodes at the grid point of the peak, if requested: ((theta, phi), F^M).
  std::vector<std::pair<std::pair<double, double>, double>> samples_at_peak;
  ConservationLog conservation;
};

/// Streams the encoding trajectories and the receiver quantities over a grid.
///
/// For an eigenstate initial |GS> with energy E0 the identity
/// exp(-iHt)|GS> = exp(-iE0 t)|GS> replaces one trajectory; the lowered
/// trajectory exp(-iHt) s-_1|GS> is always evolved, and the raised one only
/// when the quadrature route needs it.
inline QuantumProtocolResult run_quantum(const Hamiltonian& h, const InitialState& init,
                                         std::span<const double> grid,
                                         const QuantumOptions& opts = {}) {
  require(!grid.empty(), "quantum protocol needs a non-empty time grid");
  const int n = h.n_qubits();
  require(n >= 3, "the quantum protocol needs at least three sites");
  const StateVector& psi0 = init.state;
  const int sz = psi0.sector().value_or(0);
  const bool eigen = init.energy.has_value();
  const auto minus_sector = psi0.sector() ? h.sector(sz - 2) : nullptr;
  const auto plus_sector = psi0.sector() ? h.sector(sz + 2) : nullptr;
  const StateVector lowered0 = apply_pauli(psi0, 1, Pauli::Minus, minus_sector);
  const StateVector raised0 = apply_pauli(psi0, 1, Pauli::Plus, plus_sector);

  Evolution ev_low(h, lowered0, opts.propagator);
  std::optional<Evolution> ev_psi, ev_high;
  if (!eigen || opts.quadrature) ev_psi.emplace(h, psi0, opts.propagator);
  if (opts.quadrature) ev_high.emplace(h, raised0, opts.propagator);

  const double f1_static = detail::zz_matrix_element(psi0, psi0).real();
  const StateVector probe_static = detail::z_lower_receiver(h, psi0);

  QuantumProtocolResult r;
  const std::vector<double> times(grid.begin(), grid.end());
  r.average_fidelity = {"F_av", times, {}, {}};
  r.f1 = {"F1", times, {}, {}};
  r.f2 = {"F2", times, {}, {}};
  r.f3 = {"F3", times, {}, {}};
  if (opts.quadrature) {
    r.quadrature_fidelity = {"F_av_quadrature", times, {}, {}};
    r.quadrature_error = {"quadrature_error", times, {}, {}};
  }

  auto tracker = [&](const StateVector& start) {
    const double n0 = start.norm();
    const double e0 = opts.track_conservation ? h.expectation(start) : 0.0;
    return [&r, &h, &opts, n0, e0](const StateVector& now) {
      if (!opts.track_conservation) return;
      r.conservation.norm_drift = std::max(r.conservation.norm_drift, std::abs(now.norm() - n0));
      r.conservation.energy_drift = std::max(r.conservation.energy_drift, std::abs(h.expectation(now) - e0));
    };
  };
  const auto track_low = tracker(lowered0);
  const auto track_psi = tracker(psi0);
  const auto track_high = tracker(raised0);

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    ev_low.advance_to(t);
    const StateVector low = ev_low.state();
    track_low(low);

    Correlators c{};
    const Complex f2 = 2.0 * detail::zz_matrix_element(low, low);
    c.f2 = f2.real();
    c.f2_imag = f2.imag();
    std::optional<StateVector> psi_t;
    if (ev_psi) {
      ev_psi->advance_to(t);
      psi_t = ev_psi->state();
      track_psi(*psi_t);
    }
    if (eigen) {
      c.f1 = f1_static;
      c.f3 = (std::exp(-kI * (*init.energy) * t) * inner(low, probe_static)).real();
    } else {
      c.f1 = detail::zz_matrix_element(*psi_t, *psi_t).real();
      c.f3 = inner(low, detail::z_lower_receiver(h, *psi_t)).real();
    }
    r.f1.value.push_back(c.f1);
    r.f2.value.push_back(c.f2);
    r.f3.value.push_back(c.f3);
    r.average_fidelity.value.push_back(c.average_fidelity());

    if (opts.quadrature) {
      ev_high->advance_to(t);
      const StateVector high = ev_high->state();
      track_high(high);
      const auto terms = pair_cross_terms({&*psi_t, &low, &high});
      const auto q = average_measurement_fidelity(terms, opts.rule);
      r.quadrature_fidelity.value.push_back(q.value);
      r.quadrature_error.value.push_back(q.error);
    }
  }
  r.peak = find_optimal_time(r.average_fidelity);

  if (!opts.peak_samples) return r;
  // F^M on the quadrature nodes at the peak's grid time.
  const double t_peak = grid[r.peak.index];
  const StateVector psi_p = evolve(h, psi0, t_peak, opts.propagator);
  const StateVector low_p = evolve(h, lowered0, t_peak, opts.propagator);
  const StateVector high_p = evolve(h, raised0, t_peak, opts.propagator);
  const auto terms = pair_cross_terms({&psi_p, &low_p, &high_p});
  for (const auto& [angles, weight] : opts.rule.nodes()) {
    (void)weight;
    r.samples_at_peak.push_back(
        {angles, measurement_fidelity(terms.pair_state(angles.first, angles.second), angles.first,
                                      angles.second)});
  }
  return r;
}

inline QuadratureEstimate average_fidelity_quadrature(const Hamiltonian& h, const InitialState& init,
                                                      double t, const SphereRule& rule = {},
                                                      const PropagatorConfig& cfg = {}) {
  const StateVector& psi0 = init.state;
  const int sz = psi0.sector().value_or(0);
  const auto low = evolve(h, apply_pauli(psi0, 1, Pauli::Minus, psi0.sector() ? h.sector(sz - 2) : nullptr), t, cfg);
  const auto high = evolve(h, apply_pauli(psi0, 1, Pauli::Plus, psi0.sector() ? h.sector(sz + 2) : nullptr), t, cfg);
  const auto psi = evolve(h, psi0, t, cfg);
  return average_measurement_fidelity(pair_cross_terms({&psi, &low, &high}), rule);
}

inline Correlators correlators(const Hamiltonian& h, const InitialState& init, double t,
                               const PropagatorConfig& cfg = {}) {
  const std::array<double, 1> grid{t};
  QuantumOptions opts;
  opts.propagator = cfg;
  opts.track_conservation = false;
  const auto r = run_quantum(h, init, grid, opts);
  return {r.f1.value[0], r.f2.value[0], r.f3.value[0]};
}

inline double average_fidelity_analytic(const Hamiltonian& h, const InitialState& init, double t,
                                        const PropagatorConfig& cfg = {}) {
  return correlators(h, init, t, cfg).average_fidelity();
}

struct ScalingPoint {
  int n;
  double t_star;
  double fidelity;
  bool on_boundary;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  LinearFit fit;
  /// N at which the fitted line reaches the classical threshold 2/3.
  double threshold_crossing;
};

inline ScalingResult fit_fidelity_scaling(std::vector<ScalingPoint> points) {
  require(points.size() >= 4, "fidelity scaling needs at least 4 chain lengths");
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.n);
    y.push_back(p.fidelity);
  }
  ScalingResult out{std::move(points), fit_linear(x, y), 0.0};
  out.threshold_crossing = out.fit.crossing(2.0 / 3.0);
  return out;
}

/// F_av(t*) over chain lengths at fixed dimerization, window [0, window_per_site * N].
inline ScalingResult fidelity_scaling(std::span<const int> lengths, double delta,
                                      double window_per_site = 3.0, double dt = 0.05,
                                      const QuantumOptions& opts = {}, double gs_tol = 1e-10,
                                      InitKind kind = InitKind::GroundState) {
  std::vector<ScalingPoint> points;
  for (int n : lengths) {
    const auto h = build_chain(dimerized_chain(n, delta));
    const auto init = prepare_initial_state(h, kind, gs_tol);
    const auto grid = make_time_grid(window_per_site * n, dt);
    QuantumOptions o = opts;
    o.track_conservation = false;
    const auto r = run_quantum(h, init, grid, o);
    points.push_back({n, r.peak.t_star, r.peak.peak, r.peak.on_boundary});
  }
  return fit_fidelity_scaling(std::move(points));
}

}  // namespace spinlink
