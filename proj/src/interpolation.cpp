#include "bqp/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace bqp::interp {

namespace {

struct Cell {
  int i0;  // x index of the left node
  int j0;  // y index of the lower node
  Real s;  // fractional offset in x
  Real t;  // fractional offset in y
};

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

Cell locate(const Grid& g, Real x, Real y) {
  const Real h = g.spacing();
  const Real fx = x / h;
  const Real fy = y / h;
  const Real ix = std::floor(fx);
  const Real iy = std::floor(fy);
  return {wrap(static_cast<int>(ix), g.n()), wrap(static_cast<int>(iy), g.n()), fx - ix, fy - iy};
}

// Fritsch-Carlson cubic on [p1, p2] with neighbours p0, p3.
Real monotone_1d(Real p0, Real p1, Real p2, Real p3, Real s) {
  const Real d0 = p1 - p0;
  const Real d1 = p2 - p1;
  const Real d2 = p3 - p2;
  if (d1 == 0.0) return p1;
  Real m1 = (d0 * d1 > 0.0) ? 0.5 * (d0 + d1) : 0.0;
  Real m2 = (d1 * d2 > 0.0) ? 0.5 * (d1 + d2) : 0.0;
  const Real a = m1 / d1;
  const Real b = m2 / d1;
  const Real r2 = a * a + b * b;
  if (r2 > 9.0) {
    const Real tau = 3.0 / std::sqrt(r2);
    m1 *= tau;
    m2 *= tau;
  }
  const Real s2 = s * s;
  const Real s3 = s2 * s;
  return p1 + d1 * (3.0 * s2 - 2.0 * s3) + m1 * (s3 - 2.0 * s2 + s) + m2 * (s3 - s2);
}

std::array<Real, 4> lagrange_weights(Real s) {
  return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
          -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

// Hermite basis: value at 0, value at 1, slope at 0, slope at 1; and their derivatives.
std::array<Real, 4> hermite_basis(Real s) {
  const Real s2 = s * s;
  const Real s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, s3 - 2 * s2 + s, s3 - s2};
}

std::array<Real, 4> hermite_basis_d(Real s) {
  const Real s2 = s * s;
  return {6 * s2 - 6 * s, -6 * s2 + 6 * s, 3 * s2 - 4 * s + 1, 3 * s2 - 2 * s};
}

}  // namespace

Real monotone_cubic(const ScalarField& f, Real x, Real y) {
  const Grid& g = *f.grid;
  const int n = g.n();
  const Cell c = locate(g, x, y);
  std::array<Real, 4> rows{};
  Real lo = f(c.j0, c.i0);
  Real hi = lo;
  for (int b = 0; b < 4; ++b) {
    const int j = wrap(c.j0 + b - 1, n);
    const Real p0 = f(j, wrap(c.i0 - 1, n));
    const Real p1 = f(j, c.i0);
    const Real p2 = f(j, wrap(c.i0 + 1, n));
    const Real p3 = f(j, wrap(c.i0 + 2, n));
    rows[b] = monotone_1d(p0, p1, p2, p3, c.s);
    if (b == 1 || b == 2) {
      lo = std::min({lo, p1, p2});
      hi = std::max({hi, p1, p2});
    }
  }
  return std::clamp(monotone_1d(rows[0], rows[1], rows[2], rows[3], c.t), lo, hi);
}

Real lagrange_cubic(const ScalarField& f, Real x, Real y) {
  const Grid& g = *f.grid;
  const int n = g.n();
  const Cell c = locate(g, x, y);
  const auto wx = lagrange_weights(c.s);
  const auto wy = lagrange_weights(c.t);
  Real acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j = wrap(c.j0 + b - 1, n);
    Real row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * f(j, wrap(c.i0 + a - 1, n));
    acc += wy[b] * row;
  }
  return acc;
}

Departure departure_points(const VectorField2& u_old, const VectorField2& u_new, Real dt) {
  require_same_grid(u_old.grid(), u_new.grid(), "departure_points");
  const Grid& g = *u_new.grid();
  const int n = g.n();
  Departure d{Values(n, n), Values(n, n)};
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Real x = g.x(ix);
      const Real y = g.y(iy);
      const Real ax = u_new.x(iy, ix);
      const Real ay = u_new.y(iy, ix);
      const Real x1 = x - dt * ax;
      const Real y1 = y - dt * ay;
      d.x(iy, ix) = x - 0.5 * dt * (ax + lagrange_cubic(u_old.x, x1, y1));
      d.y(iy, ix) = y - 0.5 * dt * (ay + lagrange_cubic(u_old.y, x1, y1));
    }
  }
  return d;
}

ScalarField resample(const ScalarField& f, const Departure& d, Kind kind) {
  const int n = f.n();
  ScalarField out(f.grid);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      out(iy, ix) = kind == Kind::monotone_cubic ? monotone_cubic(f, d.x(iy, ix), d.y(iy, ix))
                                                 : lagrange_cubic(f, d.x(iy, ix), d.y(iy, ix));
  return out;
}

ScalarField resample_conservative(const ScalarField& f, const Departure& d) {
  const int n = f.n();
  ScalarField out = resample(f, d, Kind::monotone_cubic);
  const Real defect = f.values.sum() - out.values.sum();
  if (defect == 0.0) return out;
  // Clip and assured sum: spread the defect over the room each node has left
  // between its value and the extreme of its departure cell.
  Values room(n, n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Cell c = locate(*f.grid, d.x(iy, ix), d.y(iy, ix));
      const int i1 = wrap(c.i0 + 1, n), j1 = wrap(c.j0 + 1, n);
      const Real a = f(c.j0, c.i0), b = f(c.j0, i1), e = f(j1, c.i0), g = f(j1, i1);
      room(iy, ix) = defect > 0.0 ? std::max({a, b, e, g}) - out(iy, ix) : out(iy, ix) - std::min({a, b, e, g});
    }
  const Real total = room.sum();
  if (!(total > 0.0)) return out;
  const Real share = std::min(1.0, std::abs(defect) / total);
  out.values += std::copysign(share, defect) * room;
  return out;
}

HermiteField::HermiteField(const Spectrum& f_hat)
    : grid_(f_hat.grid),
      f_(ifft(f_hat).values),
      fx_(ifft(derivative(f_hat, 1, 0)).values),
      fy_(ifft(derivative(f_hat, 0, 1)).values),
      fxy_(ifft(derivative(f_hat, 1, 1)).values) {}

std::array<Real, 3> HermiteField::jet(Real x, Real y) const {
  const Grid& g = *grid_;
  const int n = g.n();
  const Real h = g.spacing();
  const Cell c = locate(g, x, y);
  const auto bs = hermite_basis(c.s);
  const auto bt = hermite_basis(c.t);
  const auto ds = hermite_basis_d(c.s);
  const auto dt = hermite_basis_d(c.t);
  Real v = 0.0;
  Real vx = 0.0;
  Real vy = 0.0;
  for (int b = 0; b < 2; ++b) {
    const int j = wrap(c.j0 + b, n);
    for (int a = 0; a < 2; ++a) {
      const int i = wrap(c.i0 + a, n);
      const Real F = f_(j, i);
      const Real Fx = h * fx_(j, i);
      const Real Fy = h * fy_(j, i);
      const Real Fxy = h * h * fxy_(j, i);
      v += F * bs[a] * bt[b] + Fx * bs[a + 2] * bt[b] + Fy * bs[a] * bt[b + 2] + Fxy * bs[a + 2] * bt[b + 2];
      vx += F * ds[a] * bt[b] + Fx * ds[a + 2] * bt[b] + Fy * ds[a] * bt[b + 2] + Fxy * ds[a + 2] * bt[b + 2];
      vy += F * bs[a] * dt[b] + Fx * bs[a + 2] * dt[b] + Fy * bs[a] * dt[b + 2] + Fxy * bs[a + 2] * dt[b + 2];
    }
  }
  return {v, vx / h, vy / h};
}

Real HermiteField::value(Real x, Real y) const { return jet(x, y)[0]; }

VelocitySampler::VelocitySampler(const Spectrum& psi_hat)
    : psi_(psi_hat),
      psi_xy_(derivative(psi_hat, 1, 1)),
      psi_xx_(derivative(psi_hat, 2, 0)),
      psi_yy_(derivative(psi_hat, 0, 2)) {}

VelocitySampler VelocitySampler::from_vorticity(const ScalarField& omega) {
  require_finite(omega, "VelocitySampler");
  Spectrum w = fft(omega);
  w.coeffs(0, 0) = 0.0;
  return VelocitySampler(stream_spectrum(w));
}

VelocitySampler VelocitySampler::from_stream(const ScalarField& psi) { return VelocitySampler(fft(psi)); }

Vec2 VelocitySampler::velocity(Real x, Real y) const {
  const auto j = psi_.jet(x, y);
  return {-j[2], j[1]};
}

Mat2 VelocitySampler::gradient(Real x, Real y) const {
  const Real a = -psi_xy_.value(x, y);
  Mat2 m;
  m << a, -psi_yy_.value(x, y), psi_xx_.value(x, y), -a;
  return m;
}

}  // namespace bqp::interp
