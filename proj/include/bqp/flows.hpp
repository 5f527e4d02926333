#pragma once

#include "bqp/spectral.hpp"

#include <functional>
#include <string>

namespace bqp::flows {

/// Smooth step 0 -> 1 on [a, b].
Real smooth_ramp(Real x, Real a, Real b);

/// Stream function psi = r^2/2 * erfc((r - radius) / width) / 2 around the box
/// centre: unit-speed rigid rotation (-(y - c), x - c) up to erfc(4.5) ~ 1e-10
/// for r <= radius - 4.5 width, with a Gaussian-decaying spectrum.
ScalarField rotation_stream(const GridPtr& g, Real radius, Real width);

/// Modulated shear psi = -sin(k(y - c)) (1 + cos(k(x - c)) / 2) / k, k = 2pi/L.
ScalarField shear_stream(const GridPtr& g);

/// Time-periodic cellular mixer psi = (sin kx sin ky + sin(t) cos(2kx) sin(ky) / 2) / k.
ScalarField mixer_stream(const GridPtr& g, Real t);

/// A named, possibly time-dependent divergence-free velocity u = grad_perp(psi).
struct VelocityFamily {
  std::string name;
  std::function<VectorField2(Real)> velocity;
};

/// "rotation", "shear" or "mixer"; throws ArgumentError otherwise.
VelocityFamily family(const std::string& name, const GridPtr& g);

}  // namespace bqp::flows
