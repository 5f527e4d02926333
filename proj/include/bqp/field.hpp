#pragma once

#include "bqp/grid.hpp"

#include <functional>

namespace bqp {

/// Real samples of a periodic scalar function on a Grid.
struct ScalarField {
  GridPtr grid;
  Values values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), values(Values::Zero(grid->n(), grid->n())) {}
  ScalarField(GridPtr g, Values v) : grid(std::move(g)), values(std::move(v)) {}

  static ScalarField zeros(const GridPtr& g) { return ScalarField(g); }
  static ScalarField constant(const GridPtr& g, Real c) {
    return ScalarField(g, Values::Constant(g->n(), g->n(), c));
  }
  /// Samples f(x, y) at the grid nodes (ix*h, iy*h).
  static ScalarField sample(const GridPtr& g, const std::function<Real(Real, Real)>& f);

  int n() const { return grid->n(); }
  Real& operator()(int iy, int ix) { return values(iy, ix); }
  Real operator()(int iy, int ix) const { return values(iy, ix); }

  ScalarField& operator+=(const ScalarField& o) { values += o.values; return *this; }
  ScalarField& operator-=(const ScalarField& o) { values -= o.values; return *this; }
  ScalarField& operator*=(Real a) { values *= a; return *this; }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(Real s, ScalarField a) { return a *= s; }

/// Half-plane Fourier coefficients normalized so that
/// f(x) = sum over all k of c_k exp(i k.x), with c_{-k} = conj(c_k).
struct Spectrum {
  GridPtr grid;
  Coeffs coeffs;

  Spectrum() = default;
  explicit Spectrum(GridPtr g) : grid(std::move(g)), coeffs(Coeffs::Zero(grid->n(), grid->half())) {}
  Spectrum(GridPtr g, Coeffs c) : grid(std::move(g)), coeffs(std::move(c)) {}

  Spectrum& operator+=(const Spectrum& o) { coeffs += o.coeffs; return *this; }
  Spectrum& operator-=(const Spectrum& o) { coeffs -= o.coeffs; return *this; }
  Spectrum& operator*=(Real a) { coeffs *= a; return *this; }
  Spectrum& operator*=(const SpectralTable& t) { coeffs *= t.cast<Complex>(); return *this; }
};

inline Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
inline Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
inline Spectrum operator*(Real s, Spectrum a) { return a *= s; }
inline Spectrum operator*(const SpectralTable& t, Spectrum a) { return a *= t; }

/// Planar vector field (x and y components on the same grid).
struct VectorField2 {
  ScalarField x;
  ScalarField y;

  VectorField2() = default;
  explicit VectorField2(const GridPtr& g) : x(g), y(g) {}
  VectorField2(ScalarField a, ScalarField b);

  const GridPtr& grid() const { return x.grid; }
  ScalarField& operator[](int k) { return k == 0 ? x : y; }
  const ScalarField& operator[](int k) const { return k == 0 ? x : y; }

  VectorField2& operator+=(const VectorField2& o) { x += o.x; y += o.y; return *this; }
  VectorField2& operator-=(const VectorField2& o) { x -= o.x; y -= o.y; return *this; }
  VectorField2& operator*=(Real a) { x *= a; y *= a; return *this; }
};

inline VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
inline VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
inline VectorField2 operator*(Real s, VectorField2 a) { return a *= s; }

/// Throws ArgumentError unless both fields live on grids of identical shape.
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

}  // namespace bqp
