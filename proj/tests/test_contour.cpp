#include "doctest.h"
#include "support.hpp"

#include "bqp/contour.hpp"
#include "bqp/random_fields.hpp"

#include <cmath>
#include <numbers>

using namespace bqp;
using contour::Polyline;
using contour::Vec2;

namespace {

Polyline circle(Vec2 c, Real r, int m) {
  Polyline p;
  p.closed = true;
  for (int i = 0; i < m; ++i) {
    const Real a = 2 * std::numbers::pi * i / m;
    p.points.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
  }
  return p;
}

int count_closed(const std::vector<Polyline>& lines) {
  int k = 0;
  for (const auto& l : lines) k += l.closed;
  return k;
}

}  // namespace

TEST_SUITE("contour") {

TEST_CASE("circle contour is closed and second-order accurate") {
  const Real c = std::numbers::pi;
  Real prev = 0.0;
  for (int n : {64, 128}) {
    const GridPtr g = Grid::make(n);
    const ScalarField f = ScalarField::sample(g, [c](Real x, Real y) { return std::hypot(x - c, y - c) - 1.0; });
    const auto lines = contour::zero_contour(f);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    Real worst = 0.0;
    for (const Vec2& p : lines[0].points) worst = std::max(worst, std::abs(std::hypot(p.x() - c, p.y() - c) - 1.0));
    CHECK(worst <= 0.2 * g->spacing() * g->spacing());
    if (prev > 0.0) CHECK(prev / worst >= 3.0);
    prev = worst;
    CHECK(contour::hausdorff_distance(lines[0], circle({c, c}, 1.0, 2048), g->length()) <= 0.25 * g->spacing() * g->spacing());
  }
}

TEST_CASE("contours wrap across the periodic boundary") {
  const GridPtr g = Grid::make(32);
  const ScalarField f = ScalarField::sample(g, [](Real, Real y) { return std::sin(y - 0.05); });
  const auto lines = contour::zero_contour(f);
  REQUIRE(lines.size() == 2);
  for (const auto& l : lines) {
    CHECK(l.closed);
    Real lo = 1e9, hi = -1e9;
    for (const Vec2& p : l.points) {
      lo = std::min(lo, p.x());
      hi = std::max(hi, p.x());
    }
    CHECK(hi - lo >= g->length() - 1.5 * g->spacing());
  }
}

TEST_CASE("saddle cells follow the sign of the cell average") {
  const GridPtr g = Grid::make(16);
  const Real s = 0.5 * g->spacing();
  for (Real bias : {0.1, -0.1}) {
    const ScalarField f =
        ScalarField::sample(g, [=](Real x, Real y) { return std::cos(x - s) * std::cos(y - s) + bias; });
    const auto lines = contour::zero_contour(f);
    // The minority-sign blobs stay separate: two closed loops on the torus.
    CHECK(lines.size() == 2);
    CHECK(count_closed(lines) == 2);
  }
}

TEST_CASE("mask restricts the traced cells") {
  const GridPtr g = Grid::make(32);
  const ScalarField f = ScalarField::sample(g, [](Real, Real y) { return std::sin(y - 0.05); });
  Values mask = Values::Zero(32, 32);
  mask.topRows(8) = 1.0;  // only the line near y = 0
  const auto lines = contour::zero_contour(f, &mask);
  REQUIRE(lines.size() == 1);
  CHECK(std::abs(lines[0].points[0].y() - 0.05) < 1e-2);
}

TEST_CASE("Hausdorff distance") {
  const Polyline a = circle({3, 3}, 1.0, 256);
  CHECK(contour::hausdorff_distance(a, a, 100.0) == 0.0);
  CHECK(contour::hausdorff_distance(a, circle({3, 3}, 1.25, 256), 100.0) == doctest::Approx(0.25).epsilon(1e-3));
  // minimum image across the box edge
  const Polyline left{{Vec2(0.01, 0.0), Vec2(0.01, 1.0)}, false};
  const Polyline right{{Vec2(9.99, 0.0), Vec2(9.99, 1.0)}, false};
  CHECK(contour::hausdorff_distance(left, right, 10.0) == doctest::Approx(0.02));
  CHECK_THROWS_AS(contour::hausdorff_distance(Polyline{}, a, 10.0), ArgumentError);
}

}

TEST_SUITE("random_fields") {

TEST_CASE("same function on every grid covering the band") {
  const GridPtr a = Grid::make(32), b = Grid::make(64);
  std::mt19937_64 r1(5), r2(5);
  const ScalarField fa = random::gaussian_field(a, {10, 1.0}, r1);
  const ScalarField fb = random::gaussian_field(b, {10, 1.0}, r2);
  Real worst = 0.0;
  for (int iy = 0; iy < 32; ++iy)
    for (int ix = 0; ix < 32; ++ix) worst = std::max(worst, std::abs(fa(iy, ix) - fb(2 * iy, 2 * ix)));
  CHECK(worst <= 1e-13);
}

TEST_CASE("normalization, mean and band") {
  const GridPtr g = Grid::make(64);
  std::mt19937_64 rng(9);
  const ScalarField f = random::gaussian_field(g, {12, 2.0}, rng);
  CHECK(std::abs(mean(f)) <= 1e-15);
  CHECK((f.values * f.values).mean() == doctest::Approx(1.0).epsilon(1e-12));
  const Spectrum s = fft(f);
  Real outside = 0.0;
  for (int i = 0; i < g->n(); ++i)
    for (int k = 0; k < g->half(); ++k)
      if (std::abs(g->signed_index(i)) > 12 || k > 12) outside = std::max(outside, std::abs(s.coeffs(i, k)));
  CHECK(outside <= 1e-15);
  CHECK_THROWS_AS(random::gaussian_field(g, {30, 1.0}, rng), ArgumentError);
}

TEST_CASE("solenoidal samples are divergence-free") {
  const GridPtr g = Grid::make(64);
  std::mt19937_64 rng(1);
  const VectorField2 v = random::gaussian_solenoidal(g, {16, 1.0}, rng);
  CHECK(max_abs(divergence(v)) <= 1e-12 * max_abs(v));
}

}
