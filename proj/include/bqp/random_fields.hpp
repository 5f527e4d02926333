#pragma once

#include "bqp/spectral.hpp"

#include <random>

namespace bqp::random {

/// Gaussian random trigonometric polynomial with |m|^-alpha amplitude decay on
/// the square band |m_x|, |m_y| <= band (index units), mean free.
///
/// Coefficients are drawn in a fixed mode order that does not depend on the
/// grid, so the same generator state yields the same function on every grid
/// whose dealias cutoff covers the band. Samples are scaled to unit mean square.
struct Envelope {
  int band = 8;
  Real alpha = 1.0;
};

ScalarField gaussian_field(const GridPtr& g, const Envelope& env, std::mt19937_64& rng);
VectorField2 gaussian_vector(const GridPtr& g, const Envelope& env, std::mt19937_64& rng);
/// Divergence-free field grad_perp(psi), psi drawn with decay alpha + 1.
VectorField2 gaussian_solenoidal(const GridPtr& g, const Envelope& env, std::mt19937_64& rng);

}  // namespace bqp::random
