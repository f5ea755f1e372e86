#pragma once

// Product quadrature for averages over the Bloch sphere:
// Gauss-Legendre in x = cos(theta) times the trapezoid rule in phi.
// With n_theta nodes the rule is exact for polynomials in cos(theta) of
// degree <= 2 n_theta - 1; the trapezoid rule with n_phi points is exact for
// harmonics e^{i m phi} with |m| < n_phi.

#include <cmath>
#include <utility>
#include <vector>

#include "spinlink/types.hpp"

namespace spinlink {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// P_n(x) and P_{n-1}(x) by the three-term recurrence.
inline std::pair<double, double> legendre_pair(int n, double x) {
  double prev = 1.0, cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
inline GaussLegendre gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre rule needs at least one node");
  GaussLegendre g{std::vector<double>(static_cast<std::size_t>(n)),
                  std::vector<double>(static_cast<std::size_t>(n))};
  auto derivative = [n](double x) {
    const auto [pn, pm] = legendre_pair(n, x);
    return std::pair{pn, n * (x * pn - pm) / (x * x - 1.0)};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, dp] = derivative(x);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = derivative(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    g.nodes[lo] = -x;
    g.nodes[hi] = x;
    g.weights[lo] = w;
    g.weights[hi] = w;
  }
  return g;
}

class SphereRule {
 public:
  SphereRule(int n_theta = 16, int n_phi = 32) : n_theta_(n_theta), n_phi_(n_phi), gl_(gauss_legendre(n_theta)) {
    require(n_phi >= 1, "sphere rule needs at least one azimuthal node");
  }

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }

  /// (theta, phi) node list in evaluation order with normalized weights (sum 1).
  std::vector<std::pair<std::pair<double, double>, double>> nodes() const {
    std::vector<std::pair<std::pair<double, double>, double>> out;
    for (std::size_t i = 0; i < gl_.nodes.size(); ++i)
      for (int j = 0; j < n_phi_; ++j)
        out.push_back({{std::acos(gl_.nodes[i]), 2.0 * kPi * j / n_phi_},
                       0.5 * gl_.weights[i] / n_phi_});
    return out;
  }

  /// (1/4pi) \int f(theta, phi) dOmega, summed in a fixed order.
  template <class F>
  double average(F&& f) const {
    double total = 0.0;
    for (std::size_t i = 0; i < gl_.nodes.size(); ++i) {
      const double theta = std::acos(gl_.nodes[i]);
      double ring = 0.0;
      for (int j = 0; j < n_phi_; ++j) ring += f(theta, 2.0 * kPi * j / n_phi_);
      total += 0.5 * gl_.weights[i] * ring / n_phi_;
    }
    return total;
  }

  /// The half-resolution companion rule used for error estimates.
  SphereRule coarse() const { return {std::max(1, n_theta_ / 2), std::max(1, n_phi_ / 2)}; }

 private:
  int n_theta_;
  int n_phi_;
  GaussLegendre gl_;
};

}  // namespace spinlink
