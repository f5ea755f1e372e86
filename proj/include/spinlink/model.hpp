#pragma once

// Nearest-neighbour Heisenberg chains with open boundaries,
//   H = sum_k J_k sigma_k . sigma_{k+1},
// written with Pauli operators (not spin-1/2 S = sigma/2). Energies are in
// units of J and times in units of 1/J.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "spinlink/basis.hpp"
#include "spinlink/state.hpp"
#include "spinlink/types.hpp"

namespace spinlink {

enum class CouplingPattern { Dimerized, UniformAFM, UniformFM };

inline std::string to_string(CouplingPattern p) {
  switch (p) {
    case CouplingPattern::Dimerized: return "dimerized";
    case CouplingPattern::UniformAFM: return "uniform-afm";
    case CouplingPattern::UniformFM: return "uniform-fm";
  }
  return "?";
}

struct ChainSpec {
  int n_qubits = 2;
  double delta = 0.0;
  double coupling = 1.0;
  CouplingPattern pattern = CouplingPattern::Dimerized;

  void validate() const {
    check_qubit_count(n_qubits);
    require(n_qubits >= 2, "a chain needs at least two sites");
    require(coupling > 0.0, "coupling J must be positive");
    require(delta >= 0.0 && delta <= 1.0, "dimerization must lie in [0, 1]");
    require(pattern != CouplingPattern::Dimerized || n_qubits % 2 == 0,
            "dimerized chains need an even number of sites, got " + std::to_string(n_qubits));
  }
};

inline ChainSpec dimerized_chain(int n, double delta, double coupling = 1.0) {
  return {n, delta, coupling, CouplingPattern::Dimerized};
}

/// Bond strengths J_1..J_{N-1}. Dimerized: J(1+delta) on bonds 1-2, 3-4, ...
/// and J(1-delta) on 2-3, 4-5, ...
inline RealVec bond_strengths(const ChainSpec& spec) {
  spec.validate();
  RealVec bonds(static_cast<std::size_t>(spec.n_qubits - 1));
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    switch (spec.pattern) {
      case CouplingPattern::Dimerized:
        bonds[b] = spec.coupling * (b % 2 == 0 ? 1.0 + spec.delta : 1.0 - spec.delta);
        break;
      case CouplingPattern::UniformAFM: bonds[b] = spec.coupling; break;
      case CouplingPattern::UniformFM: bonds[b] = -spec.coupling; break;
    }
  }
  return bonds;
}

class Hamiltonian {
 public:
  explicit Hamiltonian(ChainSpec spec)
      : spec_(spec), bonds_(bond_strengths(spec)), cache_(std::make_shared<SectorCache>()) {}

  const ChainSpec& spec() const { return spec_; }
  int n_qubits() const { return spec_.n_qubits; }
  const RealVec& bonds() const { return bonds_; }

  /// Diagonal (sigma^z sigma^z) energy of a basis state.
  double diagonal(BasisState s) const {
    double e = 0.0;
    for (std::size_t b = 0; b < bonds_.size(); ++b) {
      const bool differ = ((s >> b) ^ (s >> (b + 1))) & 1;
      e += differ ? -bonds_[b] : bonds_[b];
    }
    return e;
  }

  /// out = H in, on any basis exposing size()/state(i)/index(s). The flip-flop
  /// term sigma^x sigma^x + sigma^y sigma^y = 2(sigma^+ sigma^- + h.c.)
  /// preserves the number of down spins, so a sector maps into itself.
  template <class Basis, class T>
  void apply_block(const Basis& basis, std::span<const T> in, std::span<T> out) const {
    require(in.size() == basis.size() && out.size() == basis.size(),
            "apply_hamiltonian: dimension mismatch");
    const std::size_t nb = bonds_.size();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const BasisState s = basis.state(i);
      T acc = diagonal(s) * in[i];
      for (std::size_t b = 0; b < nb; ++b) {
        if ((((s >> b) ^ (s >> (b + 1))) & 1) == 0) continue;
        const auto j = basis.index(s ^ (BasisState{3} << b));
        acc += (2.0 * bonds_[b]) * in[static_cast<std::size_t>(j)];
      }
      out[i] = acc;
    }
  }

  StateVector apply(const StateVector& state) const {
    require(state.n_qubits() == n_qubits(), "apply_hamiltonian: state has " +
                                                std::to_string(state.n_qubits()) +
                                                " qubits, chain has " + std::to_string(n_qubits()));
    StateVector out = state.scaled(0.0);
    std::span<const Complex> in(state.amplitudes());
    std::span<Complex> dst(out.amplitudes());
    if (state.is_full())
      apply_block(FullBasis{n_qubits()}, in, dst);
    else
      apply_block(*state.sector_basis(), in, dst);
    return out;
  }

  double expectation(const StateVector& state) const {
    return inner(state, apply(state)).real();
  }

  /// Shared, lazily built sector table for the given sz.
  SectorPtr sector(int sz) const {
    std::lock_guard lock(cache_->mutex);
    auto& slot = cache_->sectors[sz];
    if (!slot) slot = make_sector(n_qubits(), sz);
    return slot;
  }

 private:
  struct SectorCache {
    std::mutex mutex;
    std::map<int, SectorPtr> sectors;
  };

  ChainSpec spec_;
  RealVec bonds_;
  std::shared_ptr<SectorCache> cache_;
};

inline Hamiltonian build_chain(const ChainSpec& spec) { return Hamiltonian(spec); }

inline StateVector apply_hamiltonian(const Hamiltonian& h, const StateVector& state) {
  return h.apply(state);
}

/// Sector table for sz = n_up - n_down; throws for an empty sector.
inline SectorPtr sector_decompose(const Hamiltonian& h, int sz) { return h.sector(sz); }

}  // namespace spinlink
