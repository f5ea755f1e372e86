#pragma once

// State vectors over the computational basis of an N-qubit chain, either on
// the full 2^N basis or restricted to one total-Sz sector.
//
// Sector rules for local operators:
//   sigma^z            keeps the sector
//   sigma^+, sigma^-   move to the neighbouring sector (sz +2 / -2)
//   sigma^x, sigma^y,
//   rotations          promote to the full basis (sector cleared)

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "spinlink/basis.hpp"
#include "spinlink/density.hpp"
#include "spinlink/types.hpp"

namespace spinlink {

class StateVector {
 public:
  /// Full-basis state from explicit amplitudes (length 2^N).
  StateVector(int n_qubits, ComplexVec amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
    check_qubit_count(n_qubits);
    require(amps_.size() == full_dimension(n_qubits),
            "full-basis state needs 2^N amplitudes, got " + std::to_string(amps_.size()));
  }

  /// Sector-restricted state; amplitudes are indexed by the sector basis.
  StateVector(SectorPtr sector, ComplexVec amplitudes)
      : n_(sector->n_qubits()), sector_(std::move(sector)), amps_(std::move(amplitudes)) {
    require(amps_.size() == sector_->size(),
            "sector state needs " + std::to_string(sector_->size()) + " amplitudes, got " +
                std::to_string(amps_.size()));
  }

  static StateVector zero(int n_qubits) {
    check_qubit_count(n_qubits);
    return {n_qubits, ComplexVec(full_dimension(n_qubits))};
  }

  static StateVector basis_state(int n_qubits, BasisState s) {
    StateVector v = zero(n_qubits);
    require(s < full_dimension(n_qubits), "basis state out of range");
    v.amps_[s] = 1.0;
    return v;
  }

  int n_qubits() const { return n_; }
  bool is_full() const { return sector_ == nullptr; }
  std::optional<int> sector() const {
    return sector_ ? std::optional<int>(sector_->sz()) : std::nullopt;
  }
  const SectorPtr& sector_basis() const { return sector_; }
  std::size_t size() const { return amps_.size(); }

  BasisState basis_state_at(std::size_t i) const { return sector_ ? sector_->state(i) : i; }
  /// Position of a basis state in this vector, or -1 if outside the sector.
  std::int64_t position_of(BasisState s) const {
    return sector_ ? sector_->index(s) : static_cast<std::int64_t>(s);
  }

  const ComplexVec& amplitudes() const { return amps_; }
  ComplexVec& amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }

  Complex amplitude(BasisState s) const {
    const auto j = position_of(s);
    return j < 0 ? Complex{} : amps_[static_cast<std::size_t>(j)];
  }

  double squared_norm() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return acc;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  StateVector normalized() const {
    const double nrm = norm();
    require(nrm > 0.0, "cannot normalize a zero state");
    StateVector out = *this;
    for (auto& a : out.amps_) a /= nrm;
    return out;
  }

  StateVector scaled(Complex c) const {
    StateVector out = *this;
    for (auto& a : out.amps_) a *= c;
    return out;
  }

  StateVector to_full() const {
    if (is_full()) return *this;
    ComplexVec full(full_dimension(n_));
    for (std::size_t i = 0; i < amps_.size(); ++i) full[sector_->state(i)] = amps_[i];
    return {n_, std::move(full)};
  }

  /// Projects onto a sector. Throws if weight outside the sector exceeds tol.
  StateVector restricted_to(const SectorPtr& target, double tol = 1e-12) const {
    require(target->n_qubits() == n_, "sector belongs to a chain of different length");
    ComplexVec out(target->size());
    double kept = 0.0;
    for (std::size_t i = 0; i < target->size(); ++i) {
      out[i] = amplitude(target->state(i));
      kept += std::norm(out[i]);
    }
    const double lost = squared_norm() - kept;
    require(lost <= tol, "state has weight " + std::to_string(lost) + " outside sector sz=" +
                             std::to_string(target->sz()));
    return {target, std::move(out)};
  }

  /// Projection onto a sector with no weight check (used to split a state by sector).
  StateVector projected_to(const SectorPtr& target) const {
    ComplexVec out(target->size());
    for (std::size_t i = 0; i < target->size(); ++i) out[i] = amplitude(target->state(i));
    return {target, std::move(out)};
  }

  /// Sectors carrying weight above the threshold, in increasing sz.
  std::vector<int> occupied_sectors(double threshold = 0.0) const {
    std::vector<double> weight(static_cast<std::size_t>(n_) + 1, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i)
      weight[static_cast<std::size_t>(down_count(basis_state_at(i)))] += std::norm(amps_[i]);
    std::vector<int> out;
    for (int d = n_; d >= 0; --d)
      if (weight[static_cast<std::size_t>(d)] > threshold) out.push_back(n_ - 2 * d);
    return out;
  }

 private:
  int n_;
  SectorPtr sector_;
  ComplexVec amps_;
};

/// <a|b>; the operands may live in different representations.
inline Complex inner(const StateVector& a, const StateVector& b) {
  require(a.n_qubits() == b.n_qubits(), "inner product of states on different chain lengths");
  Complex acc{};
  if (a.sector_basis() == b.sector_basis()) {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
  }
  const StateVector& small = a.size() <= b.size() ? a : b;
  const StateVector& large = a.size() <= b.size() ? b : a;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const Complex other = large.amplitude(small.basis_state_at(i));
    acc += (&small == &a) ? std::conj(small[i]) * other : std::conj(other) * small[i];
  }
  return acc;
}

/// sum_i c_i |v_i>, on the full basis unless all terms share a representation.
inline StateVector linear_combination(std::span<const Complex> coeffs,
                                      std::span<const StateVector* const> states) {
  require(!states.empty() && coeffs.size() == states.size(), "linear_combination: size mismatch");
  const bool shared = std::all_of(states.begin(), states.end(), [&](const StateVector* s) {
    return s->sector_basis() == states[0]->sector_basis();
  });
  StateVector out = shared ? states[0]->scaled(0.0) : StateVector::zero(states[0]->n_qubits());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const StateVector& s = *states[k];
    require(s.n_qubits() == out.n_qubits(), "linear_combination: chain length mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto j = shared ? static_cast<std::int64_t>(i) : static_cast<std::int64_t>(s.basis_state_at(i));
      out.amplitudes()[static_cast<std::size_t>(j)] += coeffs[k] * s[i];
    }
  }
  return out;
}

namespace detail {

inline void check_site(const StateVector& s, int site) {
  require(site >= 1 && site <= s.n_qubits(), "site " + std::to_string(site) +
                                                  " out of range [1, " +
                                                  std::to_string(s.n_qubits()) + "]");
}

/// Applies a general 2x2 operator to one site of a full-basis state.
inline StateVector apply_local_full(const StateVector& full, int site, const Matrix2c& op) {
  const BasisState m = site_mask(site);
  StateVector out = full;
  auto& dst = out.amplitudes();
  const auto& src = full.amplitudes();
  for (BasisState s = 0; s < src.size(); ++s) {
    if (s & m) continue;
    const Complex a0 = src[s];
    const Complex a1 = src[s | m];
    dst[s] = op(0, 0) * a0 + op(0, 1) * a1;
    dst[s | m] = op(1, 0) * a0 + op(1, 1) * a1;
  }
  return out;
}

}  // namespace detail

/// Applies a 2x2 operator to one site. Sector-restricted input is promoted to
/// the full basis unless the operator is diagonal.
inline StateVector apply_local(const StateVector& state, int site, const Matrix2c& op) {
  detail::check_site(state, site);
  if (!state.is_full() && op(0, 1) == Complex{} && op(1, 0) == Complex{}) {
    StateVector out = state;
    const BasisState m = site_mask(site);
    for (std::size_t i = 0; i < out.size(); ++i)
      out.amplitudes()[i] *= (out.basis_state_at(i) & m) ? op(1, 1) : op(0, 0);
    return out;
  }
  return detail::apply_local_full(state.to_full(), site, op);
}

/// sigma^axis on one site. For sigma^+/- on a sector state the result lives in
/// the adjacent sector; pass `target` to reuse an existing sector table.
inline StateVector apply_pauli(const StateVector& state, int site, Pauli axis,
                               SectorPtr target = nullptr) {
  detail::check_site(state, site);
  const bool ladder = axis == Pauli::Plus || axis == Pauli::Minus;
  if (state.is_full() || !ladder) return apply_local(state, site, pauli_matrix(axis));

  const int shift = axis == Pauli::Plus ? 2 : -2;
  const int new_sz = *state.sector() + shift;
  if (new_sz < -state.n_qubits() || new_sz > state.n_qubits()) {
    // Every component is annihilated; nothing sensible to restrict to.
    return StateVector::zero(state.n_qubits());
  }
  if (!target) target = make_sector(state.n_qubits(), new_sz);
  require(target->n_qubits() == state.n_qubits() && target->sz() == new_sz,
          "apply_pauli: target sector does not match the ladder move");
  const BasisState m = site_mask(site);
  // sigma^+ = |0><1| needs the bit set; sigma^- = |1><0| needs it clear.
  const bool need_set = axis == Pauli::Plus;
  ComplexVec out(target->size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const BasisState s = state.basis_state_at(i);
    if (static_cast<bool>(s & m) != need_set) continue;
    out[static_cast<std::size_t>(target->index(s ^ m))] = state[i];
  }
  return {target, std::move(out)};
}

inline StateVector apply_rotation(const StateVector& state, int site, double theta, double phi) {
  return apply_local(state, site, rotation_matrix(theta, phi));
}

/// Reduced density matrix over one or two sites. For two sites the first
/// listed site is the most significant qubit of the 4x4 matrix.
/// Assumes a normalized input.
inline DensityMatrix partial_trace(const StateVector& state, std::span<const int> keep) {
  require(keep.size() == 1 || keep.size() == 2, "partial_trace supports 1 or 2 kept sites");
  for (int site : keep) detail::check_site(state, site);
  require(keep.size() == 1 || keep[0] != keep[1], "partial_trace: duplicate site");

  const int k = static_cast<int>(keep.size());
  const int dim = 1 << k;
  std::vector<BasisState> masks;
  for (int site : keep) masks.push_back(site_mask(site));
  BasisState kept_mask = 0;
  for (auto m : masks) kept_mask |= m;

  auto local_index = [&](BasisState s) {
    int idx = 0;
    for (int q = 0; q < k; ++q) idx = 2 * idx + ((s & masks[static_cast<std::size_t>(q)]) ? 1 : 0);
    return idx;
  };
  auto with_local = [&](BasisState rest, int idx) {
    BasisState s = rest;
    for (int q = k - 1; q >= 0; --q, idx >>= 1)
      if (idx & 1) s |= masks[static_cast<std::size_t>(q)];
    return s;
  };

  MatrixXc rho = MatrixXc::Zero(dim, dim);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const Complex a = state[i];
    if (a == Complex{}) continue;
    const BasisState s = state.basis_state_at(i);
    const int row = local_index(s);
    const BasisState rest = s & ~kept_mask;
    for (int col = 0; col < dim; ++col) {
      const auto j = state.position_of(with_local(rest, col));
      if (j >= 0) rho(row, col) += a * std::conj(state[static_cast<std::size_t>(j)]);
    }
  }
  return DensityMatrix(rho);
}

inline DensityMatrix partial_trace(const StateVector& state, std::initializer_list<int> keep) {
  return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

/// Un-normalized cross term Tr_rest |a><b| over two sites (first site most
/// significant). Used to assemble reduced states of linear combinations.
inline Matrix4c cross_reduced(const StateVector& a, const StateVector& b, int site1, int site2) {
  require(a.n_qubits() == b.n_qubits(), "cross_reduced: chain length mismatch");
  detail::check_site(a, site1);
  detail::check_site(a, site2);
  require(site1 != site2, "cross_reduced: duplicate site");
  const BasisState m1 = site_mask(site1);
  const BasisState m2 = site_mask(site2);
  Matrix4c out = Matrix4c::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex ai = a[i];
    if (ai == Complex{}) continue;
    const BasisState s = a.basis_state_at(i);
    const int row = ((s & m1) ? 2 : 0) + ((s & m2) ? 1 : 0);
    const BasisState rest = s & ~(m1 | m2);
    for (int col = 0; col < 4; ++col) {
      const BasisState t = rest | ((col & 2) ? m1 : 0) | ((col & 1) ? m2 : 0);
      const auto j = b.position_of(t);
      if (j >= 0) out(row, col) += ai * std::conj(b[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

/// Tensor product of a single-qubit state on site 1 with a state on sites 2..N.
inline StateVector prepend_qubit(const Eigen::Vector2cd& first, const StateVector& rest) {
  const int n = rest.n_qubits() + 1;
  StateVector out = StateVector::zero(n);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const BasisState r = rest.basis_state_at(i) << 1;
    out.amplitudes()[r] += first(0) * rest[i];
    out.amplitudes()[r | 1] += first(1) * rest[i];
  }
  return out;
}

}  // namespace spinlink
