#pragma once

// Computational-basis bookkeeping.
//
// Site k (1-based) is stored in bit k-1 of a basis index. Bit value 0 is
// spin up (sigma^z = +1), bit value 1 is spin down. A total-Sz sector is
// labelled by sz = n_up - n_down, so it ranges over -N, -N+2, ..., N.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "spinlink/types.hpp"

namespace spinlink {

inline constexpr int kMaxQubits = 24;

inline constexpr BasisState site_mask(int site) { return BasisState{1} << (site - 1); }

inline constexpr int down_count(BasisState s) { return std::popcount(s); }

inline constexpr int sz_of(BasisState s, int n_qubits) { return n_qubits - 2 * down_count(s); }

inline std::size_t full_dimension(int n_qubits) { return std::size_t{1} << n_qubits; }

inline void check_qubit_count(int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= kMaxQubits,
          "qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
              std::to_string(n_qubits));
}

/// The whole 2^N basis; index and basis state coincide.
struct FullBasis {
  int n_qubits;

  std::size_t size() const { return full_dimension(n_qubits); }
  BasisState state(std::size_t i) const { return i; }
  std::int64_t index(BasisState s) const { return static_cast<std::int64_t>(s); }
};

/// One total-Sz block: the sorted list of basis states with a fixed number of
/// down spins, plus the reverse map from full index to block index.
class SectorBasis {
 public:
  SectorBasis(int n_qubits, int sz) : n_qubits_(n_qubits), sz_(sz) {
    check_qubit_count(n_qubits);
    require(sz >= -n_qubits && sz <= n_qubits && (n_qubits - sz) % 2 == 0,
            "empty Sz sector: sz=" + std::to_string(sz) + " for N=" + std::to_string(n_qubits));
    const int downs = (n_qubits - sz) / 2;
    lookup_.assign(full_dimension(n_qubits), -1);
    if (downs == 0) {
      add(0);
      return;
    }
    // Gosper's hack enumerates fixed-popcount words in increasing order.
    BasisState s = (BasisState{1} << downs) - 1;
    const BasisState limit = BasisState{1} << n_qubits;
    while (s < limit) {
      add(s);
      const BasisState c = s & (~s + 1);
      const BasisState r = s + c;
      s = (((r ^ s) >> 2) / c) | r;
    }
  }

  int n_qubits() const { return n_qubits_; }
  int sz() const { return sz_; }
  int down_spins() const { return (n_qubits_ - sz_) / 2; }
  std::size_t size() const { return states_.size(); }
  BasisState state(std::size_t i) const { return states_[i]; }
  std::int64_t index(BasisState s) const { return lookup_[s]; }
  const std::vector<BasisState>& states() const { return states_; }

 private:
  void add(BasisState s) {
    lookup_[s] = static_cast<std::int32_t>(states_.size());
    states_.push_back(s);
  }

  int n_qubits_;
  int sz_;
  std::vector<BasisState> states_;
  std::vector<std::int32_t> lookup_;
};

using SectorPtr = std::shared_ptr<const SectorBasis>;

inline SectorPtr make_sector(int n_qubits, int sz) {
  return std::make_shared<const SectorBasis>(n_qubits, sz);
}

}  // namespace spinlink
