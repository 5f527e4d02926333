#include "doctest.h"
#include "support.hpp"

#include "bqp/flows.hpp"
#include "bqp/lagrangian.hpp"
#include "bqp/lp.hpp"

#include <cmath>
#include <numbers>

using namespace bqp;
using namespace bqp::lagrangian;
using bqp::testing::max_diff;
using bqp::testing::random_band;
using std::numbers::pi;

namespace {

Flow rigid_rotation(const Vec2& c) {
  return {[c](const Vec2& p) { return Vec2(-(p.y() - c.y()), p.x() - c.x()); },
          [](const Vec2&) {
            Mat2 m;
            m << 0, -1, 1, 0;
            return m;
          }};
}

}  // namespace

TEST_SUITE("lagrangian") {

TEST_CASE("periodic spline") {
  std::vector<Real> v;
  const int m = 128;
  for (int i = 0; i < m; ++i) v.push_back(std::sin(2 * pi * i / m) + 0.3 * std::cos(3 * 2 * pi * i / m));
  const PeriodicSpline s(v);
  for (int i = 0; i < m; ++i) {
    const Real sig = 2 * pi * i / m;
    CHECK(s.node_derivative(i) == doctest::Approx(std::cos(sig) - 0.9 * std::sin(3 * sig)).epsilon(1e-5));
    CHECK(s.value(sig + 0.3 * s.step()) ==
          doctest::Approx(std::sin(sig + 0.3 * s.step()) + 0.3 * std::cos(3 * (sig + 0.3 * s.step()))).epsilon(1e-6));
  }
}

TEST_CASE("circle area") {
  const PatchState p = PatchState::circle(Vec2(pi, pi), 0.6, 1024);
  CHECK(p.area() == doctest::Approx(pi * 0.36).epsilon(1e-10));
  CHECK(p.spacing_ratio() == doctest::Approx(1.0));
}

TEST_CASE("zero velocity leaves markers alone") {
  PatchState p = PatchState::circle(Vec2(pi, pi), 0.6, 128);
  const auto before = p.markers;
  for (int i = 0; i < 10; ++i) advect_markers(p, Flow::zero(), Flow::zero(), 0.01, SafeRegion::central(2 * pi));
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p.markers[i] == before[i]);
    CHECK(p.jacobians[i] == Mat2::Identity());
  }
}

TEST_CASE("rigid rotation keeps the circle and rotates the Jacobian") {
  const Vec2 c(pi, pi);
  PatchState p = PatchState::circle(c, 0.6, 256);
  const int steps = 20000;
  const Real dt = 2 * pi / steps;
  const Flow rot = rigid_rotation(c);
  for (int i = 0; i < steps; ++i) advect_markers(p, rot, rot, dt, SafeRegion::central(2 * pi));
  Real radius_err = 0.0;
  Real jac_err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    radius_err = std::max(radius_err, std::abs((p.markers[i] - c).norm() - 0.6));
    jac_err = std::max(jac_err, (p.jacobians[i] - Mat2::Identity()).cwiseAbs().maxCoeff());
  }
  CHECK(radius_err <= 1e-10);
  CHECK(p.max_det_defect() <= 1e-10);
  // one full turn: the rotation matrix is the identity again (up to the O(dt^2) phase error)
  CHECK(jac_err <= 1e-6);

  PatchState q = PatchState::circle(c, 0.6, 64);
  for (int i = 0; i < 1000; ++i) advect_markers(q, rot, rot, 1e-3, SafeRegion::central(2 * pi));
  Mat2 expected;
  expected << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  CHECK((q.jacobians[5] - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("area conserved by a smooth steady flow") {
  const GridPtr g = Grid::make(128);
  ScalarField w = random_band(g, 4, 77);
  w *= 0.3 / max_abs(w);
  const Flow flow = Flow::from(interp::VelocitySampler::from_vorticity(w));
  PatchState p = PatchState::circle(Vec2(pi, pi), 0.6, 1024);
  const Real a0 = p.area();
  for (int i = 0; i < 500; ++i) advect_markers(p, flow, flow, 2e-3, SafeRegion::central(2 * pi));
  CHECK(std::abs(p.area() - a0) <= 1e-6 * a0);
  CHECK(p.max_det_defect() <= 1e-12);
}

TEST_CASE("marker escape is reported") {
  PatchState p = PatchState::circle(Vec2(pi, pi), 0.6, 64);
  const Flow drift{[](const Vec2&) { return Vec2(5.0, 0.0); }, [](const Vec2&) { return Mat2::Zero().eval(); }};
  CHECK_THROWS_AS(advect_markers(p, drift, drift, 0.5, SafeRegion::central(2 * pi)), DomainTruncationError);
}

TEST_CASE("redistribution equalizes spacing on the same curve") {
  PatchState p;
  const int m = 256;
  for (int i = 0; i < m; ++i) {
    const Real s = 2 * pi * i / m;
    const Real warped = s + 0.4 * std::sin(s);  // uneven spacing on a circle
    p.markers.push_back(Vec2(pi + std::cos(warped), pi + std::sin(warped)));
  }
  p.jacobians.assign(m, 2.0 * Mat2::Identity());
  p.x0.assign(m, Vec2::Zero());
  CHECK(p.spacing_ratio() > 2.0);
  redistribute(p, [](const Vec2& q) { return Vec2(q.y(), -q.x()); });
  CHECK(p.spacing_ratio() <= 1.0 + 1e-4);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK((p.markers[i] - Vec2(pi, pi)).norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.jacobians[i] == Mat2::Identity());
    CHECK(p.x0[i] == Vec2(p.markers[i].y(), -p.markers[i].x()));
  }
  CHECK(p.redistributions == 1);
}

TEST_CASE("jacobian representation at t = 0 and with u = 0") {
  PatchState p = PatchState::circle(Vec2(pi, pi), 0.6, 64);
  for (std::size_t i = 0; i < p.size(); ++i) p.x0[i] = Vec2(std::sin(i), std::cos(i));
  auto xs = X_from_jacobian(p);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(xs[i] == p.x0[i]);
  for (int k = 0; k < 5; ++k) advect_markers(p, Flow::zero(), Flow::zero(), 0.1, SafeRegion::central(2 * pi));
  xs = X_from_jacobian(p);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(xs[i] == p.x0[i]);
}

TEST_CASE("band profile") {
  CHECK(band_profile(0.0) == 0.0);
  CHECK(band_profile(-0.3) == -band_profile(0.3));
  CHECK(band_profile(2.0) == band_profile(1.0));
  // derivative at 0 is beta(0) = 1
  CHECK(band_profile(1e-4) / 1e-4 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("level-set tangent field is divergence-free and tangent") {
  const GridPtr g = Grid::make(128);
  const Real r0 = 0.6;
  const ScalarField f0 = levelset_from_distance(
      g, [r0](Real x, Real y) { return std::hypot(x - pi, y - pi) - r0; }, 8 * g->spacing());
  const VectorField2 X0 = tangent_field(f0);
  CHECK(max_abs(divergence(X0)) <= 1e-10 * max_abs(X0));
  // On the circle X0 is (approximately) the counter-clockwise unit tangent.
  const interp::HermiteField hx(X0.x);
  const interp::HermiteField hy(X0.y);
  for (int i = 0; i < 32; ++i) {
    const Real s = 2 * pi * i / 32;
    const Vec2 p(pi + r0 * std::cos(s), pi + r0 * std::sin(s));
    const Vec2 x(hx.value(p.x(), p.y()), hy.value(p.x(), p.y()));
    const Vec2 normal(std::cos(s), std::sin(s));
    CHECK(std::abs(x.dot(normal)) <= 5e-3);
    CHECK(x.dot(Vec2(-std::sin(s), std::cos(s))) == doctest::Approx(1.0).epsilon(2e-2));
  }
}

TEST_CASE("level-set transport") {
  const GridPtr g = Grid::make(128);
  const ScalarField f0 = levelset_from_distance(
      g, [](Real x, Real y) { return std::hypot(x - pi, y - pi) - 0.6; }, 8 * g->spacing());
  const LevelSet ls{f0, 8 * g->spacing()};
  const VectorField2 zero(g);
  CHECK(max_diff(advect_level_set(ls, zero, zero, 0.1).f, f0) <= 1e-15);

  CHECK(ls.band_mask().sum() > 0.0);

  // a radial field is invariant under rotation
  const GridPtr fine = Grid::make(256);
  const auto radial = [](Real x, Real y) { return std::exp(-((x - pi) * (x - pi) + (y - pi) * (y - pi)) / (2 * 1.44)); };
  const LevelSet bump{ScalarField::sample(fine, radial), 1.0};
  const VectorField2 u = perp_gradient(flows::rotation_stream(fine, 2.0, 0.2));
  LevelSet cur = bump;
  for (int i = 0; i < 50; ++i) cur = advect_level_set(cur, u, u, 0.02);
  Real err = 0.0;
  for (int iy = 0; iy < 256; ++iy)
    for (int ix = 0; ix < 256; ++ix)
      if (std::hypot(fine->x(ix) - pi, fine->y(iy) - pi) < 1.0) err = std::max(err, std::abs(cur.f(iy, ix) - bump.f(iy, ix)));
  CHECK(err <= 1e-6);
}

// X0 = e1 g(r) confined to the rigid core; the exact solution is R(t) X0(R(-t) x).
VectorField2 confined_x0(const GridPtr& g, Real radius, Real width) {
  return VectorField2(ScalarField::sample(g, [=](Real x, Real y) {
                        return 0.5 * std::erfc((std::hypot(x - pi, y - pi) - radius) / width);
                      }),
                      ScalarField(g));
}

Real rotated_error(const VectorField2& X, Real t, Real radius, Real width) {
  const GridPtr& g = X.grid();
  Real err = 0.0;
  for (int iy = 0; iy < g->n(); ++iy)
    for (int ix = 0; ix < g->n(); ++ix) {
      const Real amp = 0.5 * std::erfc((std::hypot(g->x(ix) - pi, g->y(iy) - pi) - radius) / width);
      err = std::max(err, std::abs(X.x(iy, ix) - amp * std::cos(t)));
      err = std::max(err, std::abs(X.y(iy, ix) - amp * std::sin(t)));
    }
  return err;
}

TEST_CASE("eulerian X under rigid rotation") {
  const GridPtr g = Grid::make(256);
  const VectorField2 u = perp_gradient(flows::rotation_stream(g, 2.0, 0.2));
  const VectorField2 X0 = confined_x0(g, 0.55, 0.12);
  CHECK(max_diff(evolve_X_eulerian(X0, [g](Real) { return VectorField2(g); }, 0.0, 0.1), X0) <= 1e-15);
  VectorField2 X = X0;
  const int steps = 125;  // the shear ring moves at speed ~6, so dt * 6 * K must stay below the RK3 bound
  const Real dt = 0.25 / steps;
  for (int i = 0; i < steps; ++i) X = evolve_X_eulerian(X, [&u](Real) { return u; }, i * dt, dt, ifrk::Scheme::ifrk3);
  CHECK(rotated_error(X, 0.25, 0.55, 0.12) <= 1e-8);
}

TEST_CASE("semi-Lagrangian X under rigid rotation") {
  const GridPtr g = Grid::make(128);
  const VectorField2 u = perp_gradient(flows::rotation_stream(g, 2.0, 0.2));
  VectorField2 X = confined_x0(g, 0.5, 0.25);
  const interp::Departure d = interp::departure_points(u, u, 1e-2);
  for (int i = 0; i < 50; ++i) X = evolve_X_semilagrangian(X, d, u, u, 1e-2);
  CHECK(rotated_error(X, 0.5, 0.5, 0.25) <= 1e-3);
}

TEST_CASE("boundary C^{1,eps} norm of a circle") {
  const Real eps = 0.5;
  const PatchState p = PatchState::circle(Vec2(pi, pi), 1.0, 512);
  const BoundaryNorm b = boundary_c1eps_norm(p, eps);
  // analytic: sup over delta in (0, pi] of 2 sin(delta / 2) / delta^eps
  Real analytic = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    const Real delta = pi * k / 200000;
    analytic = std::max(analytic, 2 * std::sin(delta / 2) / std::pow(delta, eps));
  }
  CHECK(b.holder == doctest::Approx(analytic).epsilon(0.02));
  CHECK(b.arc_chord == doctest::Approx(pi / 2).epsilon(1e-3));
  CHECK(b.c1 == doctest::Approx(std::hypot(pi, pi) + 1.0 + 1.0).epsilon(1e-3));

  PatchState big = p;
  for (auto& m : big.markers) m = Vec2(pi, pi) + 1.7 * (m - Vec2(pi, pi));
  CHECK(boundary_c1eps_norm(big, eps).holder == doctest::Approx(b.holder).epsilon(1e-9));

  // ellipse with semi-axes sqrt(2), 1/sqrt(2) has the circle's area
  PatchState ell = p;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    const Real s = 2 * pi * i / ell.size();
    ell.markers[i] = Vec2(pi + std::sqrt(2.0) * std::cos(s), pi + std::sin(s) / std::sqrt(2.0));
  }
  CHECK(ell.area() == doctest::Approx(p.area()).epsilon(1e-9));
  CHECK(boundary_c1eps_norm(ell, eps).holder > b.holder);

  PatchState flat = p;
  for (auto& m : flat.markers) m = Vec2(1.0, 1.0);
  CHECK_THROWS_AS(boundary_c1eps_norm(flat, eps), DegeneracyError);
}

TEST_CASE("hoelder quotient and LP hoelder norms agree within a factor of 8") {
  const GridPtr g = Grid::make(64);
  for (unsigned seed = 1; seed <= 6; ++seed) {
    for (Real eps : {0.25, 0.5, 0.75}) {
      const ScalarField f = random_band(g, 2 + static_cast<int>(seed), seed);
      const Real direct = holder_quotient_norm(f, eps);
      const Real lp_value = lp::besov_norm(f, lp::BesovSpec::holder(eps));
      CHECK(direct / lp_value <= 8.0);
      CHECK(lp_value / direct <= 8.0);
    }
  }
}

}
