#pragma once

#include "bqp/ifrk.hpp"
#include "bqp/interpolation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bqp::lagrangian {

using interp::Mat2;
using interp::Vec2;

/// Velocity and velocity gradient at a point; adapts samplers and analytic flows.
struct Flow {
  std::function<Vec2(const Vec2&)> velocity;
  std::function<Mat2(const Vec2&)> gradient;

  static Flow from(const interp::VelocitySampler& s);
  static Flow zero();
};

/// Square [lo, hi]^2 that markers must not leave.
struct SafeRegion {
  Real lo = 0.0;
  Real hi = 0.0;
  /// The central region [L/8, 7L/8]^2.
  static SafeRegion central(Real length) { return {length / 8.0, 7.0 * length / 8.0}; }
  bool contains(const Vec2& p) const { return p.x() >= lo && p.x() <= hi && p.y() >= lo && p.y() <= hi; }
};

/// Interpolating periodic cubic spline through values at sigma_i = i * 2pi / M.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(std::vector<Real> values);

  std::size_t size() const { return y_.size(); }
  Real step() const { return h_; }
  Real value(Real sigma) const;
  Real derivative(Real sigma) const;
  /// Derivative at node i (d/dsigma).
  Real node_derivative(std::size_t i) const;

 private:
  std::vector<Real> y_;
  std::vector<Real> m_;  // second derivatives at the nodes
  Real h_;
};

/// Boundary markers gamma(sigma_i), sigma_i = 2 pi i / M, with per-marker flow-map
/// Jacobians and the X_0 sample carried by each marker's label.
struct PatchState {
  std::vector<Vec2> markers;
  std::vector<Mat2> jacobians;
  std::vector<Vec2> x0;
  int redistributions = 0;

  /// M markers on a circle, counter-clockwise, identity Jacobians.
  static PatchState circle(const Vec2& center, Real radius, int count);

  std::size_t size() const { return markers.size(); }
  /// d gamma / d sigma from the periodic spline through the markers.
  std::vector<Vec2> tangents() const;
  /// Signed enclosed area (positive for counter-clockwise curves), Green's theorem
  /// with spline tangents and the periodic trapezoid rule.
  Real area() const;
  /// Largest over smallest adjacent spacing.
  Real spacing_ratio() const;
  /// Max |det J - 1| over markers.
  Real max_det_defect() const;
};

/// One Heun step of the flow map with u_old at t and u_new at t + dt. The
/// Jacobians follow dV/dt = grad u V through the exponential of the trapezoidal
/// average of the trace-free gradients, which keeps det J = 1.
void advect_markers(PatchState& patch, const Flow& u_old, const Flow& u_new, Real dt, const SafeRegion& safe);

/// Resamples at equal arc length; Jacobians reset to the identity and the
/// label samples re-seeded from `x_current` (the Eulerian X at the new points).
void redistribute(PatchState& patch, const std::function<Vec2(const Vec2&)>& x_current);

/// D psi(t, x0) X0(x0) at every marker.
std::vector<Vec2> X_from_jacobian(const PatchState& patch);

/// Level-set function f0 = w B(d / w) with B' = exp(1 - 1/(1 - t^2)) on (-1, 1):
/// equal to the signed distance d to first order at the boundary, constant
/// outside the band |d| >= w.
ScalarField levelset_from_distance(const GridPtr& g, const std::function<Real(Real, Real)>& signed_distance, Real width);
/// The band profile B.
Real band_profile(Real s);

/// X0 = grad_perp of the dealiased f0; exactly divergence-free.
VectorField2 tangent_field(const ScalarField& f0);

struct LevelSet {
  ScalarField f;
  Real band_width = 0.0;
  /// 1 on cells within band_width of the zero set (|f| < band value), else 0.
  Values band_mask() const;
};

/// Semi-Lagrangian transport of f along precomputed departure points.
LevelSet advect_level_set(const LevelSet& ls, const interp::Departure& d);
LevelSet advect_level_set(const LevelSet& ls, const VectorField2& u_old, const VectorField2& u_new, Real dt);

/// Explicit part of dX/dt = -u.grad X + grad u X, dealiased, for each component.
std::array<Spectrum, 2> x_transport_rhs(const VectorField2& X, const VectorField2& u);

/// Spectral IF-RK step of X for a prescribed velocity u(t).
VectorField2 evolve_X_eulerian(const VectorField2& X, const std::function<VectorField2(Real)>& u, Real t, Real dt,
                               ifrk::Scheme scheme = ifrk::Scheme::ifrk2);

/// Semi-Lagrangian alternative: X(x_d) carried to x with the trapezoidal
/// stretching solve (I - dt/2 A_new(x)) X^{n+1} = (I + dt/2 A_old(x_d)) X^n(x_d).
VectorField2 evolve_X_semilagrangian(const VectorField2& X, const interp::Departure& d, const VectorField2& u_old,
                                     const VectorField2& u_new, Real dt);

struct BoundaryNorm {
  Real c1 = 0.0;          // sup |gamma| + sup |d gamma / d sigma|
  Real holder = 0.0;      // eps-Hoelder seminorm of the unit tangent, |sigma1 - sigma2| <= pi
  Real arc_chord = 0.0;   // sup arc length / chord
  Real total() const { return c1 + holder; }
};

/// C^{1,eps} diagnostics of the marker curve. Needs at least 64 markers.
BoundaryNorm boundary_c1eps_norm(const PatchState& patch, Real eps);

/// Direct estimate sup|f| + sup |f(x) - f(y)| / |x - y|^eps over grid pairs
/// with a dyadic set of periodic displacements.
Real holder_quotient_norm(const ScalarField& f, Real eps);

}  // namespace bqp::lagrangian
