#pragma once

#include "bqp/spectral.hpp"

#include <cmath>
#include <random>

namespace bqp::testing {

/// Random trigonometric polynomial sum_{|m| <= kmax} a cos(m.x) + b sin(m.x),
/// summed directly in physical space (no FFT involved).
inline ScalarField random_band(const GridPtr& g, int kmax, unsigned seed, bool mean_free = true, int kmin = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField f(g);
  const Real unit = g->wavenumber_unit();
  const int n = g->n();
  for (int my = 0; my <= kmax; ++my) {
    for (int mx = -kmax; mx <= kmax; ++mx) {
      if (my == 0 && mx < 0) continue;
      const Real radius = std::hypot(mx, my);
      if (radius < kmin || (mean_free && mx == 0 && my == 0)) continue;
      const Real a = normal(rng);
      const Real b = (mx == 0 && my == 0) ? 0.0 : normal(rng);
      Eigen::ArrayXd cx(n), sx(n), cy(n), sy(n);
      for (int i = 0; i < n; ++i) {
        cx(i) = std::cos(unit * mx * g->x(i));
        sx(i) = std::sin(unit * mx * g->x(i));
        cy(i) = std::cos(unit * my * g->y(i));
        sy(i) = std::sin(unit * my * g->y(i));
      }
      for (int iy = 0; iy < n; ++iy) {
        // cos(p + q) and sin(p + q) from the separable factors
        f.values.row(iy) += (a * (cx * cy(iy) - sx * sy(iy)) + b * (sx * cy(iy) + cx * sy(iy))).transpose();
      }
    }
  }
  return f;
}

inline Real max_diff(const ScalarField& a, const ScalarField& b) { return (a.values - b.values).abs().maxCoeff(); }

inline Real max_diff(const VectorField2& a, const VectorField2& b) {
  return std::max(max_diff(a.x, b.x), max_diff(a.y, b.y));
}

}  // namespace bqp::testing
