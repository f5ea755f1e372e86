#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "spinlink/lanczos.hpp"
#include "spinlink/model.hpp"
#include "spinlink/state.hpp"

namespace spinlink {

enum class InitKind { GroundState, SingletProduct };

inline std::string to_string(InitKind k) {
  return k == InitKind::GroundState ? "gs" : "singlets";
}

/// The chain state the sender encodes into.
struct InitialState {
  StateVector state;
  /// Set when the state is an eigenstate of the evolution Hamiltonian.
  std::optional<double> energy;
  /// Eigen-residual of the ground-state solve (0 for exact constructions).
  double residual = 0.0;
  InitKind kind = InitKind::GroundState;
};

/// prod_j (|0 1> - |1 0>)/sqrt(2) on pairs (1,2), (3,4), ...; Sz = 0 sector.
inline StateVector singlet_product(const SectorPtr& sz0) {
  const int n = sz0->n_qubits();
  require(n % 2 == 0 && sz0->sz() == 0, "singlet product needs even N and the Sz = 0 sector");
  const double amp = std::pow(0.5, n / 4.0);
  ComplexVec a(sz0->size());
  for (std::size_t i = 0; i < sz0->size(); ++i) {
    const BasisState s = sz0->state(i);
    double sign = 1.0;
    bool valid = true;
    for (int k = 0; k < n && valid; k += 2) {
      const bool first = (s >> k) & 1, second = (s >> (k + 1)) & 1;
      if (first == second) valid = false;
      else if (first) sign = -sign;
    }
    if (valid) a[i] = sign * amp;
  }
  return {sz0, std::move(a)};
}

inline InitialState prepare_initial_state(const Hamiltonian& h, InitKind kind, double gs_tol = 1e-10) {
  if (kind == InitKind::SingletProduct)
    return {singlet_product(h.sector(0)), std::nullopt, 0.0, kind};
  auto gs = ground_state(h, gs_tol);
  return {std::move(gs.state), gs.energy, gs.residual, kind};
}

/// Largest deviation of norm and energy from their initial values along a trajectory.
struct ConservationLog {
  double norm_drift = 0.0;
  double energy_drift = 0.0;

  void merge(const ConservationLog& o) {
    norm_drift = std::max(norm_drift, o.norm_drift);
    energy_drift = std::max(energy_drift, o.energy_drift);
  }
};

}  // namespace spinlink
