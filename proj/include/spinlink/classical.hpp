#pragma once

// Dense-coding-like classical transfer: the sender applies one of
// {I, sigma^x, sigma^y, sigma^z} to site 1, the chain evolves, and the
// receiver's pair (N-1, N) is read out by a Bell measurement. The Holevo
// quantity is evaluated from the four evolved output states directly, so the
// effective channel is never reconstructed.

#include <array>
#include <future>
#include <vector>

#include "spinlink/density.hpp"
#include "spinlink/initial.hpp"
#include "spinlink/krylov.hpp"
#include "spinlink/timeseries.hpp"

namespace spinlink {

using Priors = std::array<double, 4>;
inline constexpr Priors kUniformPriors{0.25, 0.25, 0.25, 0.25};

inline StateVector encode_classical(const StateVector& gs, BellLabel a) {
  switch (a) {
    case BellLabel::I: return gs;
    case BellLabel::X: return apply_pauli(gs, 1, Pauli::X);
    case BellLabel::Y: return apply_pauli(gs, 1, Pauli::Y);
    case BellLabel::Z: return apply_pauli(gs, 1, Pauli::Z);
  }
  return gs;
}

struct ReceiverTrack {
  std::vector<DensityMatrix> pair_states;
  ConservationLog conservation;
};

/// Reduced states of sites (N-1, N) along the grid for one encoded input.
inline ReceiverTrack receiver_track(const Hamiltonian& h, const StateVector& input,
                                    std::span<const double> grid, const PropagatorConfig& cfg,
                                    bool track_conservation = true) {
  const int n = h.n_qubits();
  ReceiverTrack out;
  out.pair_states.reserve(grid.size());
  const double norm0 = input.norm();
  const double e0 = track_conservation ? h.expectation(input) : 0.0;
  evolve_visit(h, input, grid, cfg, [&](std::size_t, double, const StateVector& s) {
    out.pair_states.push_back(partial_trace(s, {n - 1, n}));
    if (track_conservation) {
      out.conservation.norm_drift = std::max(out.conservation.norm_drift, std::abs(s.norm() - norm0));
      out.conservation.energy_drift =
          std::max(out.conservation.energy_drift, std::abs(h.expectation(s) - e0));
    }
  });
  return out;
}

inline TimeSeries bell_fidelity_series(const Hamiltonian& h, const StateVector& gs, BellLabel a,
                                       std::span<const double> grid, const PropagatorConfig& cfg = {}) {
  const auto track = receiver_track(h, encode_classical(gs, a), grid, cfg, false);
  TimeSeries s{"F_" + to_string(a), {grid.begin(), grid.end()}, {}, {}};
  const VectorXc target = bell_state(a);
  for (const auto& rho : track.pair_states) s.value.push_back(state_fidelity(rho, target));
  return s;
}

struct ClassicalOptions {
  PropagatorConfig propagator;
  Priors priors = kUniformPriors;
  bool track_conservation = true;
};

struct ClassicalProtocolResult {
  std::array<TimeSeries, 4> bell_fidelity;  // indexed like kBellLabels
  TimeSeries mean_fidelity;
  TimeSeries holevo;
  Priors priors;
  /// Peak of the Holevo quantity.
  OptimalTime capacity_peak;
  /// Peak of the prior-weighted mean Bell fidelity.
  OptimalTime fidelity_peak;
  /// F^a at the fidelity peak's grid point.
  std::array<double, 4> fidelity_at_peak;
  ConservationLog conservation;
};

inline void check_priors(const Priors& q) {
  double total = 0.0;
  for (double v : q) {
    require(v >= 0.0, "priors must be non-negative");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, "priors must sum to 1");
}

/// All four encodings evolved concurrently; series assembled in label order.
inline ClassicalProtocolResult run_classical(const Hamiltonian& h, const StateVector& initial,
                                             std::span<const double> grid,
                                             const ClassicalOptions& opts = {}) {
  check_priors(opts.priors);
  require(!grid.empty(), "classical protocol needs a non-empty time grid");
  std::array<std::future<ReceiverTrack>, 4> jobs;
  for (std::size_t a = 0; a < 4; ++a) {
    jobs[a] = std::async(std::launch::async, [&, a] {
      return receiver_track(h, encode_classical(initial, kBellLabels[a]), grid, opts.propagator,
                            opts.track_conservation);
    });
  }
  std::array<ReceiverTrack, 4> tracks;
  for (std::size_t a = 0; a < 4; ++a) tracks[a] = jobs[a].get();

  ClassicalProtocolResult r;
  r.priors = opts.priors;
  const std::vector<double> times(grid.begin(), grid.end());
  r.mean_fidelity = {"F_mean", times, {}, {}};
  r.holevo = {"holevo_bits", times, {}, {}};
  for (std::size_t a = 0; a < 4; ++a) {
    r.bell_fidelity[a] = {"F_" + to_string(kBellLabels[a]), times, {}, {}};
    r.conservation.merge(tracks[a].conservation);
  }
  std::vector<DensityMatrix> outputs;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    outputs.clear();
    double mean = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      const auto& rho = tracks[a].pair_states[k];
      const double f = state_fidelity(rho, bell_state(kBellLabels[a]));
      r.bell_fidelity[a].value.push_back(f);
      mean += opts.priors[a] * f;
      outputs.push_back(rho);
    }
    r.mean_fidelity.value.push_back(mean);
    r.holevo.value.push_back(holevo_information(outputs, opts.priors));
  }
  r.capacity_peak = find_optimal_time(r.holevo);
  r.fidelity_peak = find_optimal_time(r.mean_fidelity);
  for (std::size_t a = 0; a < 4; ++a)
    r.fidelity_at_peak[a] = r.bell_fidelity[a].value[r.fidelity_peak.index];
  return r;
}

inline TimeSeries holevo_series(const Hamiltonian& h, const StateVector& gs, const Priors& priors,
                                std::span<const double> grid, const PropagatorConfig& cfg = {}) {
  ClassicalOptions opts;
  opts.propagator = cfg;
  opts.priors = priors;
  opts.track_conservation = false;
  return run_classical(h, gs, grid, opts).holevo;
}

}  // namespace spinlink
