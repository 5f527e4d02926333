#include "bqp/random_fields.hpp"

#include "bqp/fft.hpp"

#include <cmath>

namespace bqp::random {

ScalarField gaussian_field(const GridPtr& g, const Envelope& env, std::mt19937_64& rng) {
  if (env.band < 1) throw ArgumentError("random field band must be >= 1");
  if (env.band > g->dealias_cutoff())
    throw ArgumentError("random field band " + std::to_string(env.band) + " exceeds the dealias cutoff " +
                        std::to_string(g->dealias_cutoff()));
  std::normal_distribution<Real> normal(0.0, 1.0);
  const int n = g->n();
  Spectrum s(g);
  Real power = 0.0;
  for (int mx = 0; mx <= env.band; ++mx) {
    for (int my = -env.band; my <= env.band; ++my) {
      if (mx == 0 && my <= 0) continue;
      const Real a = normal(rng);
      const Real b = normal(rng);
      const Complex c = Complex(a, b) * std::pow(std::hypot(mx, my), -env.alpha);
      s.coeffs((my + n) % n, mx) = c;
      if (mx == 0) s.coeffs((n - my) % n, 0) = std::conj(c);
      power += 2.0 * std::norm(c);
    }
  }
  s *= 1.0 / std::sqrt(power);
  return ifft(s);
}

VectorField2 gaussian_vector(const GridPtr& g, const Envelope& env, std::mt19937_64& rng) {
  ScalarField x = gaussian_field(g, env, rng);
  ScalarField y = gaussian_field(g, env, rng);
  return VectorField2(std::move(x), std::move(y));
}

VectorField2 gaussian_solenoidal(const GridPtr& g, const Envelope& env, std::mt19937_64& rng) {
  return perp_gradient(gaussian_field(g, {env.band, env.alpha + 1.0}, rng));
}

}  // namespace bqp::random
