#include "bqp/spectral.hpp"

#include <cmath>
#include <string>

namespace bqp {

ScalarField ScalarField::sample(const GridPtr& g, const std::function<Real(Real, Real)>& f) {
  ScalarField out(g);
  const int n = g->n();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) out(iy, ix) = f(g->x(ix), g->y(iy));
  return out;
}

VectorField2::VectorField2(ScalarField a, ScalarField b) : x(std::move(a)), y(std::move(b)) {
  require_same_grid(x.grid, y.grid, "VectorField2");
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (!a || !b || !a->same_shape(*b)) throw ArgumentError(std::string(where) + ": fields live on different grids");
}

void require_finite(const ScalarField& f, const char* what) {
  if (!f.values.allFinite()) throw DataIntegrityError(std::string(what) + ": non-finite field values");
}

void require_finite(const VectorField2& v, const char* what) {
  require_finite(v.x, what);
  require_finite(v.y, what);
}

Spectrum dealias(Spectrum s) {
  s *= s.grid->dealias_mask();
  return s;
}

ScalarField dealias(const ScalarField& f) { return ifft(dealias(fft(f))); }

Spectrum derivative(const Spectrum& s, int ax, int ay) {
  const Grid& g = *s.grid;
  Spectrum out(s.grid);
  const int n = g.n();
  const int h = g.half();
  const Complex i(0.0, 1.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < h; ++c) {
      Complex m(1.0, 0.0);
      for (int a = 0; a < ax; ++a) m *= i * g.kx()(c);
      for (int a = 0; a < ay; ++a) m *= i * g.ky()(r);
      out.coeffs(r, c) = m * s.coeffs(r, c);
    }
  }
  return out;
}

ScalarField derivative(const ScalarField& f, int ax, int ay) { return ifft(derivative(fft(f), ax, ay)); }

VectorField2 gradient(const ScalarField& f) {
  require_finite(f, "gradient");
  const Spectrum s = fft(f);
  return {ifft(derivative(s, 1, 0)), ifft(derivative(s, 0, 1))};
}

ScalarField divergence(const VectorField2& v) {
  Spectrum s = derivative(fft(v.x), 1, 0);
  s += derivative(fft(v.y), 0, 1);
  return ifft(s);
}

ScalarField curl(const VectorField2& v) {
  Spectrum s = derivative(fft(v.y), 1, 0);
  s -= derivative(fft(v.x), 0, 1);
  return ifft(s);
}

VectorField2 perp_gradient(const ScalarField& f) {
  const Spectrum s = fft(f);
  return {-1.0 * ifft(derivative(s, 0, 1)), ifft(derivative(s, 1, 0))};
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "product");
  return dealias(ScalarField(a.grid, a.values * b.values));
}

ScalarField convect(const VectorField2& v, const ScalarField& f) {
  const VectorField2 g = gradient(f);
  return dealias(ScalarField(f.grid, v.x.values * g.x.values + v.y.values * g.y.values));
}

Spectrum stream_spectrum(const Spectrum& omega_hat) {
  Spectrum psi(omega_hat.grid);
  const SpectralTable& k2 = omega_hat.grid->k_squared();
  psi.coeffs = -omega_hat.coeffs / k2.cast<Complex>();
  psi.coeffs(0, 0) = 0.0;
  return psi;
}

ScalarField stream_function(const ScalarField& omega) {
  require_finite(omega, "stream_function");
  return ifft(stream_spectrum(fft(omega)));
}

VectorField2 biot_savart(const ScalarField& omega, WarningLog* log) {
  require_finite(omega, "biot_savart");
  Spectrum w = fft(omega);
  const Real m = w.coeffs(0, 0).real();
  const Real scale = omega.values.abs().maxCoeff();
  if (std::abs(m) > 1e-10 * scale && log) {
    log->add("biot_savart: removed nonzero vorticity mean " + std::to_string(m));
  }
  w.coeffs(0, 0) = 0.0;
  const Spectrum psi = stream_spectrum(w);
  return {-1.0 * ifft(derivative(psi, 0, 1)), ifft(derivative(psi, 1, 0))};
}

SpectralTable heat_symbol(const Grid& g, Real nu, Real dt) {
  if (!(nu >= 0.0) || !(dt >= 0.0)) throw ArgumentError("heat_multiplier: nu and dt must be nonnegative");
  return (-nu * dt * g.k_squared()).exp();
}

Spectrum heat_multiplier(Spectrum s, Real nu, Real dt) {
  s *= heat_symbol(*s.grid, nu, dt);
  return s;
}

ScalarField heat_multiplier(const ScalarField& f, Real nu, Real dt) {
  require_finite(f, "heat_multiplier");
  return ifft(heat_multiplier(fft(f), nu, dt));
}

ScalarField recover_pressure(const VectorField2& u, const ScalarField& theta) {
  require_finite(u, "recover_pressure");
  require_finite(theta, "recover_pressure");
  const ScalarField fx = -1.0 * convect(u, u.x);
  ScalarField fy = -1.0 * convect(u, u.y);
  fy += theta;
  Spectrum div = derivative(fft(fx), 1, 0);
  div += derivative(fft(fy), 0, 1);
  Spectrum pi(div.grid);
  pi.coeffs = -div.coeffs / div.grid->k_squared().cast<Complex>();
  pi.coeffs(0, 0) = 0.0;
  return ifft(pi);
}

VectorField2 leray_project(const VectorField2& v) {
  const Grid& g = *v.grid();
  Spectrum a = fft(v.x), b = fft(v.y);
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.half(); ++c) {
      const Real k1 = g.kx()(c), k2 = g.ky()(r);
      const Real kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) continue;
      const Complex dot = (k1 * a.coeffs(r, c) + k2 * b.coeffs(r, c)) / kk;
      a.coeffs(r, c) -= k1 * dot;
      b.coeffs(r, c) -= k2 * dot;
    }
  }
  return {ifft(a), ifft(b)};
}

ScalarField gaussian_mollify(const ScalarField& f, Real width) {
  if (width <= 0.0) return f;
  Spectrum s = fft(f);
  s *= (-0.5 * width * width * f.grid->k_squared()).exp();
  return ifft(s);
}

Real mean(const ScalarField& f) { return f.values.mean(); }
Real integral(const ScalarField& f) { return f.values.sum() * f.grid->cell_area(); }
Real inner(const ScalarField& a, const ScalarField& b) { return (a.values * b.values).sum() * a.grid->cell_area(); }
Real max_abs(const ScalarField& f) { return f.values.abs().maxCoeff(); }
Real max_abs(const VectorField2& v) { return std::max(max_abs(v.x), max_abs(v.y)); }
Real max_speed(const VectorField2& v) { return (v.x.values.square() + v.y.values.square()).sqrt().maxCoeff(); }

}  // namespace bqp
