#pragma once

#include "bqp/spectral.hpp"

#include <Eigen/Dense>

#include <array>

namespace bqp::interp {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Tensor-product Fritsch-Carlson cubic, clamped to the range of the four
/// surrounding nodes. Never creates new extrema.
Real monotone_cubic(const ScalarField& f, Real x, Real y);
/// Tensor-product 4-point Lagrange cubic (unlimited).
Real lagrange_cubic(const ScalarField& f, Real x, Real y);

enum class Kind { monotone_cubic, lagrange_cubic };

/// Departure points of the backward characteristics through every grid node.
struct Departure {
  Values x;
  Values y;
};

/// Backward trapezoidal (RK2) characteristics over [t, t + dt]:
/// x1 = x - dt u_new(x), x_d = x - dt/2 (u_new(x) + u_old(x1)).
Departure departure_points(const VectorField2& u_old, const VectorField2& u_new, Real dt);

/// f evaluated at every departure point.
ScalarField resample(const ScalarField& f, const Departure& d, Kind kind);
/// Monotone resample corrected to keep the grid sum of f; every value stays
/// within the range of the four nodes around its departure point.
ScalarField resample_conservative(const ScalarField& f, const Departure& d);

/// C^1 bicubic Hermite interpolant built from spectrally exact nodal jets
/// (f, f_x, f_y, f_xy).
class HermiteField {
 public:
  HermiteField() = default;
  explicit HermiteField(const Spectrum& f_hat);
  explicit HermiteField(const ScalarField& f) : HermiteField(fft(f)) {}

  Real value(Real x, Real y) const;
  /// Value and gradient of the interpolant.
  std::array<Real, 3> jet(Real x, Real y) const;
  const GridPtr& grid() const { return grid_; }

 private:
  GridPtr grid_;
  Values f_, fx_, fy_, fxy_;
};

/// Velocity and velocity gradient at arbitrary points for u = grad_perp(psi).
///
/// Velocity is the perpendicular gradient of the Hermite interpolant of psi,
/// so it is exactly divergence-free. The gradient interpolates psi_xy, psi_xx
/// and psi_yy separately and is exactly trace-free.
class VelocitySampler {
 public:
  VelocitySampler() = default;
  static VelocitySampler from_vorticity(const ScalarField& omega);
  static VelocitySampler from_stream(const ScalarField& psi);

  Vec2 velocity(Real x, Real y) const;
  Mat2 gradient(Real x, Real y) const;
  const GridPtr& grid() const { return psi_.grid(); }

 private:
  explicit VelocitySampler(const Spectrum& psi_hat);

  HermiteField psi_;
  HermiteField psi_xy_;
  HermiteField psi_xx_;
  HermiteField psi_yy_;
};

}  // namespace bqp::interp
