#pragma once

// Ground states by restarted Lanczos with full reorthogonalization, run in
// real arithmetic inside one total-Sz sector (the Hamiltonian is real
// symmetric in the computational basis).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spinlink/model.hpp"
#include "spinlink/state.hpp"

namespace spinlink {

namespace linalg {

template <class T>
inline auto dot(std::span<const T> a, std::span<const T> b) {
  T acc{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_same_v<T, Complex>)
      acc += std::conj(a[i]) * b[i];
    else
      acc += a[i] * b[i];
  }
  return acc;
}

template <class T, class S>
inline void axpy(S alpha, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <class T>
inline double norm(std::span<const T> a) {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return std::sqrt(acc);
}

template <class T>
inline void scale(std::span<T> a, double s) {
  for (auto& v : a) v *= s;
}

/// Two passes of classical Gram-Schmidt of w against the columns in basis.
template <class T>
inline void orthogonalize(const std::vector<std::vector<T>>& basis, std::size_t count,
                          std::span<T> w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < count; ++k) {
      std::span<const T> q(basis[k]);
      const T c = dot<T>(q, std::span<const T>(w));
      axpy<T>(-c, q, w);
    }
  }
}

}  // namespace linalg

struct LanczosOptions {
  /// Sector to search; defaults to sz = 0 for even N and sz = +1 for odd N.
  std::optional<int> sector;
  int max_basis = 60;
  int max_restarts = 400;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Minimum accepted E1 - E0 inside the sector.
  double min_gap = 1e-6;
  bool check_gap = true;
  int gap_iterations = 80;
};

struct GroundStateResult {
  double energy;
  StateVector state;
  /// || H|psi> - E0 |psi> ||
  double residual;
  /// Estimate of E1 - E0 in the same sector (infinity for a one-state sector).
  double gap;
  int matvecs;
};

namespace detail {

struct LanczosRun {
  double ritz_value;
  std::vector<double> ritz_vector;
  int matvecs;
};

/// One Lanczos cycle from `start` (normalized on entry), optionally deflating
/// against `deflate`. Returns the lowest Ritz pair of the cycle.
inline LanczosRun lanczos_cycle(const Hamiltonian& h, const SectorBasis& basis,
                                const std::vector<double>& start, int max_basis, double tol,
                                const std::vector<double>* deflate) {
  const std::size_t dim = basis.size();
  const std::size_t m_max = std::min<std::size_t>(static_cast<std::size_t>(max_basis),
                                                  dim - (deflate ? 1 : 0));
  std::vector<std::vector<double>> q;
  q.reserve(m_max);
  q.push_back(start);
  std::vector<double> alpha, beta;
  std::vector<double> w(dim);
  int matvecs = 0;
  Eigen::VectorXd y;
  double theta = 0.0;

  for (std::size_t j = 0; j < m_max; ++j) {
    h.apply_block<SectorBasis, double>(basis, q[j], w);
    ++matvecs;
    alpha.push_back(linalg::dot<double>(q[j], w));
    if (deflate) {
      const double c = linalg::dot<double>(*deflate, w);
      linalg::axpy<double>(-c, *deflate, w);
    }
    linalg::orthogonalize<double>(q, j + 1, w);
    const double b = linalg::norm<double>(w);

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index k = 0; k + 1 < m; ++k) sub(k) = beta[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = es.eigenvalues()(0);
    y = es.eigenvectors().col(0);

    const bool exhausted = b < 1e-13 || j + 1 == m_max;
    if (exhausted || b * std::abs(y(m - 1)) < 0.1 * tol) break;
    beta.push_back(b);
    linalg::scale<double>(w, 1.0 / b);
    q.push_back(w);
  }

  std::vector<double> x(dim, 0.0);
  for (Eigen::Index k = 0; k < y.size(); ++k)
    linalg::axpy<double>(y(k), q[static_cast<std::size_t>(k)], x);
  linalg::scale<double>(x, 1.0 / linalg::norm<double>(x));
  return {theta, std::move(x), matvecs};
}

inline std::vector<double> seeded_start(std::size_t dim, std::uint64_t seed,
                                        const std::vector<double>* deflate) {
  // Fixed-seed pseudo-random start. A uniform vector is unusable here: it is
  // the fully symmetric (maximal total spin) state, an exact eigenvector.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = dist(rng);
  if (deflate) {
    const double c = linalg::dot<double>(*deflate, v);
    linalg::axpy<double>(-c, *deflate, v);
  }
  linalg::scale<double>(v, 1.0 / linalg::norm<double>(v));
  return v;
}

}  // namespace detail

/// Lowest eigenpair within one Sz sector. The returned state is normalized
/// with its largest-magnitude amplitude made positive.
inline GroundStateResult ground_state(const Hamiltonian& h, double tol = 1e-10,
                                      const LanczosOptions& opts = {}) {
  const int n = h.n_qubits();
  const int sz = opts.sector.value_or(n % 2 == 0 ? 0 : 1);
  const SectorPtr basis = h.sector(sz);
  const std::size_t dim = basis->size();

  std::vector<double> x;
  double energy = 0.0;
  double residual = 0.0;
  int matvecs = 0;

  if (dim == 1) {
    x = {1.0};
    energy = h.diagonal(basis->state(0));
  } else {
    x = detail::seeded_start(dim, opts.seed, nullptr);
    std::vector<double> hx(dim);
    residual = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < opts.max_restarts; ++restart) {
      auto run = detail::lanczos_cycle(h, *basis, x, opts.max_basis, tol, nullptr);
      matvecs += run.matvecs;
      x = std::move(run.ritz_vector);
      h.apply_block<SectorBasis, double>(*basis, x, hx);
      ++matvecs;
      energy = linalg::dot<double>(x, hx);
      linalg::axpy<double>(-energy, x, hx);
      residual = linalg::norm<double>(hx);
      if (residual < tol) break;
    }
    if (!(residual < tol))
      throw ConvergenceError("Lanczos did not converge: residual " + std::to_string(residual) +
                                 " after " + std::to_string(matvecs) + " matvecs",
                             residual);
  }

  double gap = std::numeric_limits<double>::infinity();
  if (opts.check_gap && dim > 1) {
    auto start = detail::seeded_start(dim, opts.seed ^ 0x9e3779b97f4a7c15ULL, &x);
    auto excited =
        detail::lanczos_cycle(h, *basis, start, std::min(opts.gap_iterations, static_cast<int>(dim) - 1),
                              tol, &x);
    matvecs += excited.matvecs;
    gap = excited.ritz_value - energy;
    if (gap <= opts.min_gap)
      throw Error("ground state is (near-)degenerate in sector sz=" + std::to_string(sz) +
                  ": estimated gap " + std::to_string(gap));
  }

  const auto big = std::max_element(x.begin(), x.end(),
                                    [](double a, double b) { return std::abs(a) < std::abs(b); });
  const double sign = *big < 0.0 ? -1.0 : 1.0;
  ComplexVec amps(dim);
  for (std::size_t i = 0; i < dim; ++i) amps[i] = sign * x[i];
  return {energy, StateVector(basis, std::move(amps)), residual, gap, matvecs};
}

}  // namespace spinlink
