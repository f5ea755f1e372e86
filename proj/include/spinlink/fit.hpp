#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "spinlink/types.hpp"

namespace spinlink {

struct LinearFit {
  double slope;
  double intercept;
  std::vector<double> residuals;
  double r_squared;

  double at(double x) const { return slope * x + intercept; }
  /// x at which the line reaches y.
  double crossing(double y) const {
    require(slope != 0.0, "flat fit line never crosses");
    return (y - intercept) / slope;
  }
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_linear: x and y differ in length");
  require(x.size() >= 3, "fit_linear needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 1e-300, "fit_linear: degenerate x values");
  LinearFit fit{sxy / sxx, 0.0, {}, 1.0};
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals.push_back(y[i] - fit.at(x[i]));
    ss_res += fit.residuals.back() * fit.residuals.back();
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace spinlink
