#pragma once

#include "bqp/config.hpp"
#include "bqp/lagrangian.hpp"
#include "bqp/solver.hpp"

namespace bqp::scenario {

/// Initial data of the temperature-patch run together with its boundary markers.
struct Scenario {
  solver::SimState state;
  lagrangian::PatchState patch;
  /// Width of the level-set band around the zero contour.
  Real level_band = 0.0;
  /// Cell count of the sampled disc times the cell area.
  Real disc_area_grid = 0.0;
  /// Green's-theorem area of the marker curve.
  Real disc_area_markers = 0.0;
  /// Relative gap between the grid quadrature and the closed-form integral of the ring profile.
  Real ring_quadrature_error = 0.0;
};

/// theta0 = M1 1_D0 (cell-center sign test), omega0 = M2 1_D0 - w0 with w0 a
/// multiple of the ring profile around the annulus D0* whose integral is
/// M2 |D0| (|D0| = cell count times cell area), and
/// X0 = grad_perp f0 for the band-limited level set f0 of D0.
Scenario build_scenario(const config::Config& cfg);

/// exp(-36 s^2) with s = (r - mid) / half, cut to zero for |s| >= 1.
Real ring_profile(Real r, Real mid, Real half);
/// Closed-form plane integral of ring_profile(|x|, mid, half) (exact up to the e^-36 tails).
Real ring_integral(Real mid, Real half);

}  // namespace bqp::scenario
