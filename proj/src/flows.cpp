#include "bqp/flows.hpp"

#include <cmath>
#include <numbers>

namespace bqp::flows {

Real smooth_ramp(Real x, Real a, Real b) {
  const Real t = (x - a) / (b - a);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const Real p = std::exp(-1.0 / t);
  const Real q = std::exp(-1.0 / (1.0 - t));
  return p / (p + q);
}

ScalarField rotation_stream(const GridPtr& g, Real radius, Real width) {
  const Real c = 0.5 * g->length();
  return ScalarField::sample(g, [=](Real x, Real y) {
    const Real r2 = (x - c) * (x - c) + (y - c) * (y - c);
    return 0.25 * r2 * std::erfc((std::sqrt(r2) - radius) / width);
  });
}

ScalarField shear_stream(const GridPtr& g) {
  const Real c = 0.5 * g->length();
  const Real k = g->wavenumber_unit();
  return ScalarField::sample(g, [=](Real x, Real y) {
    return -std::sin(k * (y - c)) * (1.0 + 0.5 * std::cos(k * (x - c))) / k;
  });
}

ScalarField mixer_stream(const GridPtr& g, Real t) {
  const Real k = g->wavenumber_unit();
  return ScalarField::sample(g, [=](Real x, Real y) {
    return (std::sin(k * x) * std::sin(k * y) + 0.5 * std::sin(t) * std::cos(2.0 * k * x) * std::sin(k * y)) / k;
  });
}

VelocityFamily family(const std::string& name, const GridPtr& g) {
  if (name == "rotation") {
    const VectorField2 u = perp_gradient(rotation_stream(g, g->length() / std::numbers::pi, 0.1 * g->length() / std::numbers::pi));
    return {name, [u](Real) { return u; }};
  }
  if (name == "shear") {
    const VectorField2 u = perp_gradient(shear_stream(g));
    return {name, [u](Real) { return u; }};
  }
  if (name == "mixer") {
    return {name, [g](Real t) { return perp_gradient(mixer_stream(g, t)); }};
  }
  throw ArgumentError("unknown velocity family '" + name + "' (expected rotation, shear or mixer)");
}

}  // namespace bqp::flows
