#pragma once

#include "bqp/field.hpp"

namespace bqp {

/// Forward real-to-complex transform, normalized by 1/n^2.
Spectrum fft(const ScalarField& f);

/// Inverse transform; exact inverse of fft() up to roundoff.
ScalarField ifft(const Spectrum& s);

}  // namespace bqp
