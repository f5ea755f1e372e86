#pragma once

// Real-time propagation |psi(t)> = exp(-iHt)|psi> by short Krylov steps.
//
// Each step builds an orthonormal Lanczos basis of the current vector, forms
// exp(-i tau T) e_1 for the small tridiagonal T, and estimates the local
// error from the last Krylov weight, beta_m |[exp(-i tau T) e_1]_m|. The
// step is halved (re-using the same basis) until that estimate is below the
// tolerance. States spanning several Sz sectors are split and each sector is
// propagated on its own.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "spinlink/lanczos.hpp"
#include "spinlink/model.hpp"
#include "spinlink/state.hpp"

namespace spinlink {

struct PropagatorConfig {
  int krylov_dim = 30;
  /// Largest single step, in units of 1/J.
  double dt = 0.05;
  /// Local error tolerance per step (2-norm).
  double tol = 1e-10;
  /// Propagate sector by sector (otherwise on the whole 2^N basis).
  bool split_sectors = true;

  void validate() const {
    require(krylov_dim >= 2, "krylov_dim must be at least 2");
    require(dt > 0.0, "propagator step must be positive");
    require(tol > 0.0, "propagator tolerance must be positive");
  }
};

namespace detail {

/// Propagates one block vector (full basis or one sector) in place.
template <class Basis>
class BlockPropagator {
 public:
  BlockPropagator(const Hamiltonian& h, const Basis& basis, const PropagatorConfig& cfg)
      : h_(h), basis_(basis), cfg_(cfg) {}

  void advance(ComplexVec& v, double t) {
    double done = 0.0;
    while (t - done > 1e-14 * std::max(1.0, t)) {
      const double want = std::min(cfg_.dt, t - done);
      done += step(v, want);
    }
  }

 private:
  /// Takes one step of at most `tau`; returns the step actually taken.
  double step(ComplexVec& v, double tau) {
    const std::size_t dim = v.size();
    const double beta0 = linalg::norm<Complex>(v);
    if (beta0 == 0.0) return tau;
    const std::size_t m_max = std::min<std::size_t>(static_cast<std::size_t>(cfg_.krylov_dim), dim);

    q_.resize(std::max(q_.size(), m_max));
    q_[0].assign(v.begin(), v.end());
    linalg::scale<Complex>(q_[0], 1.0 / beta0);

    std::vector<double> alpha, beta;
    ComplexVec w(dim);
    Eigen::VectorXcd coeffs;
    double taken = tau;
    std::size_t used = 0;

    for (std::size_t j = 0; j < m_max; ++j) {
      h_.template apply_block<Basis, Complex>(basis_, q_[j], w);
      alpha.push_back(linalg::dot<Complex>(q_[j], w).real());
      linalg::orthogonalize<Complex>(q_, j + 1, w);
      const double b = linalg::norm<Complex>(w);
      used = j + 1;

      const bool breakdown = b < 1e-13;
      const bool last = j + 1 == m_max;
      double err = 0.0;
      coeffs = small_exp(alpha, beta, tau);
      if (!breakdown) err = beta0 * b * std::abs(coeffs(static_cast<Eigen::Index>(j)));
      if (breakdown || err <= cfg_.tol) break;
      if (last) {
        // Basis exhausted: shrink the step until the estimate is met.
        taken = tau;
        while (true) {
          taken *= 0.5;
          require(taken > 1e-12 * std::max(1.0, tau),
                  "Krylov step size underflow: tolerance unreachable with krylov_dim=" +
                      std::to_string(cfg_.krylov_dim));
          coeffs = small_exp(alpha, beta, taken);
          err = beta0 * b * std::abs(coeffs(static_cast<Eigen::Index>(j)));
          if (err <= cfg_.tol) break;
        }
        break;
      }
      beta.push_back(b);
      linalg::scale<Complex>(w, 1.0 / b);
      q_[j + 1].assign(w.begin(), w.end());
    }

    std::fill(v.begin(), v.end(), Complex{});
    for (std::size_t k = 0; k < used; ++k)
      linalg::axpy<Complex>(beta0 * coeffs(static_cast<Eigen::Index>(k)), q_[k], std::span<Complex>(v));
    return taken;
  }

  static Eigen::VectorXcd small_exp(const std::vector<double>& alpha,
                                    const std::vector<double>& beta, double tau) {
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index k = 0; k < m; ++k) diag(k) = alpha[static_cast<std::size_t>(k)];
    for (Eigen::Index k = 0; k + 1 < m; ++k) sub(k) = beta[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& s = es.eigenvectors();
    Eigen::VectorXcd phases(m);
    for (Eigen::Index k = 0; k < m; ++k)
      phases(k) = std::exp(-kI * tau * es.eigenvalues()(k)) * s(0, k);
    return s.cast<Complex>() * phases;
  }

  const Hamiltonian& h_;
  const Basis& basis_;
  PropagatorConfig cfg_;
  std::vector<ComplexVec> q_;
};

}  // namespace detail

/// Streams exp(-iHt)|state> at each time of an ascending grid to `visit`.
/// Each grid point continues from the previous one.
class Evolution {
 public:
  Evolution(const Hamiltonian& h, const StateVector& state, PropagatorConfig cfg)
      : h_(h), cfg_(cfg), n_(state.n_qubits()), input_sector_(state.sector_basis()) {
    cfg_.validate();
    require(state.n_qubits() == h.n_qubits(), "evolve: state and Hamiltonian differ in length");
    if (!state.is_full()) {
      blocks_.push_back({state.sector_basis(), state.amplitudes()});
    } else if (cfg_.split_sectors) {
      for (int sz : state.occupied_sectors()) {
        const SectorPtr sec = h.sector(sz);
        blocks_.push_back({sec, state.projected_to(sec).amplitudes()});
      }
    } else {
      blocks_.push_back({nullptr, state.amplitudes()});
    }
  }

  double time() const { return time_; }

  void advance_to(double t) {
    require(t >= time_ - 1e-12, "evolve: time grid must be ascending");
    const double dt = t - time_;
    if (dt > 0.0) {
      for (auto& blk : blocks_) {
        if (blk.sector) {
          detail::BlockPropagator<SectorBasis> prop(h_, *blk.sector, cfg_);
          prop.advance(blk.amps, dt);
        } else {
          const FullBasis full{n_};
          detail::BlockPropagator<FullBasis> prop(h_, full, cfg_);
          prop.advance(blk.amps, dt);
        }
      }
    }
    time_ = std::max(time_, t);
  }

  /// Current state, in the representation of the input.
  StateVector state() const {
    if (input_sector_) return {input_sector_, blocks_.front().amps};
    if (blocks_.size() == 1 && !blocks_.front().sector) return {n_, blocks_.front().amps};
    StateVector out = StateVector::zero(n_);
    for (const auto& blk : blocks_)
      for (std::size_t i = 0; i < blk.amps.size(); ++i)
        out.amplitudes()[blk.sector->state(i)] = blk.amps[i];
    return out;
  }

 private:
  struct Block {
    SectorPtr sector;
    ComplexVec amps;
  };

  const Hamiltonian& h_;
  PropagatorConfig cfg_;
  int n_;
  SectorPtr input_sector_;
  std::vector<Block> blocks_;
  double time_ = 0.0;
};

inline StateVector evolve(const Hamiltonian& h, const StateVector& state, double t,
                          const PropagatorConfig& cfg = {}) {
  require(t >= 0.0, "evolve: negative time");
  Evolution ev(h, state, cfg);
  ev.advance_to(t);
  return ev.state();
}

using StateVisitor = std::function<void(std::size_t index, double t, const StateVector& state)>;

inline void evolve_visit(const Hamiltonian& h, const StateVector& state,
                         std::span<const double> grid, const PropagatorConfig& cfg,
                         const StateVisitor& visit) {
  require(grid.empty() || grid.front() >= 0.0, "evolve: time grid must start at t >= 0");
  Evolution ev(h, state, cfg);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ev.advance_to(grid[k]);
    visit(k, grid[k], ev.state());
  }
}

inline std::vector<StateVector> evolve_series(const Hamiltonian& h, const StateVector& state,
                                              std::span<const double> grid,
                                              const PropagatorConfig& cfg = {}) {
  std::vector<StateVector> out;
  out.reserve(grid.size());
  evolve_visit(h, state, grid, cfg,
               [&](std::size_t, double, const StateVector& s) { out.push_back(s); });
  return out;
}

}  // namespace spinlink
