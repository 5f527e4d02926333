#include "bqp/scenario.hpp"

#include "bqp/interpolation.hpp"

#include <cmath>
#include <numbers>

namespace bqp::scenario {
namespace {

Real wrap(Real d, Real length) { return d - length * std::round(d / length); }

}  // namespace

Real ring_profile(Real r, Real mid, Real half) {
  const Real s = (r - mid) / half;
  return std::abs(s) < 1.0 ? std::exp(-36.0 * s * s) : 0.0;
}

Real ring_integral(Real mid, Real half) {
  // Untruncated Gaussian of width sigma = half / 6 in r, integrated against 2 pi r dr;
  // the cut tails carry a relative e^-36 of the mass.
  const Real sigma = half / 6.0, z = mid / sigma;
  return 2.0 * std::numbers::pi *
         (0.5 * sigma * sigma * std::exp(-z * z) + mid * sigma * 0.5 * std::sqrt(std::numbers::pi) * (1.0 + std::erf(z)));
}

Scenario build_scenario(const config::Config& cfg) {
  cfg.validate();
  const GridPtr g = Grid::make(cfg.grid.n, cfg.grid.length);
  const auto& sc = cfg.scenario;
  const Real L = g->length();

  auto disc_distance = [&](Real x, Real y) {
    return std::hypot(wrap(x - sc.center_x, L), wrap(y - sc.center_y, L)) - sc.radius;
  };
  const ScalarField inside = ScalarField::sample(g, [&](Real x, Real y) { return disc_distance(x, y) < 0.0 ? 1.0 : 0.0; });

  Scenario out;
  out.disc_area_grid = integral(inside);

  const Real mid = 0.5 * (sc.annulus_inner + sc.annulus_outer);
  const Real half = 0.5 * (sc.annulus_outer - sc.annulus_inner);
  const ScalarField ring = ScalarField::sample(g, [&](Real x, Real y) {
    return ring_profile(std::hypot(wrap(x - sc.annulus_x, L), wrap(y - sc.annulus_y, L)), mid, half);
  });
  const Real ring_mass = ring_integral(mid, half);
  out.ring_quadrature_error = std::abs(integral(ring) - ring_mass) / ring_mass;

  const ScalarField theta0 = cfg.physics.M1 * inside;
  const ScalarField omega0 =
      dealias(cfg.physics.M2 * inside - (cfg.physics.M2 * out.disc_area_grid / ring_mass) * ring);
  out.state = solver::SimState::make(theta0, omega0, cfg.physics.nu);

  out.level_band = sc.levelset_width;
  out.state.has_levelset = true;
  out.state.f = lagrangian::levelset_from_distance(g, disc_distance, out.level_band);
  out.state.has_x = true;
  out.state.X = lagrangian::tangent_field(out.state.f);

  out.patch = lagrangian::PatchState::circle({sc.center_x, sc.center_y}, sc.radius, sc.markers);
  const interp::HermiteField x1(out.state.X.x), x2(out.state.X.y);
  for (std::size_t i = 0; i < out.patch.size(); ++i) {
    const auto& m = out.patch.markers[i];
    out.patch.x0[i] = {x1.value(m.x(), m.y()), x2.value(m.x(), m.y())};
  }
  out.disc_area_markers = out.patch.area();
  return out;
}

}  // namespace bqp::scenario
