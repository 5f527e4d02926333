#pragma once

#include "bqp/error.hpp"
#include "bqp/fft.hpp"

namespace bqp {

/// Throws DataIntegrityError if any sample is NaN or infinite.
void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField2& v, const char* what);

/// Applies the dealias mask (idempotent).
Spectrum dealias(Spectrum s);
ScalarField dealias(const ScalarField& f);

/// Multiplies by (i kx)^ax (i ky)^ay. Nyquist modes carry zero derivative.
Spectrum derivative(const Spectrum& s, int ax, int ay);
ScalarField derivative(const ScalarField& f, int ax, int ay);

/// (d1 f, d2 f) by spectral multiplication; no truncation beyond the Nyquist modes.
VectorField2 gradient(const ScalarField& f);
/// d1 v^1 + d2 v^2.
ScalarField divergence(const VectorField2& v);
/// Scalar curl d1 v^2 - d2 v^1.
ScalarField curl(const VectorField2& v);
/// (-d2 f, d1 f).
VectorField2 perp_gradient(const ScalarField& f);

/// Dealiased pointwise product P(a b).
ScalarField product(const ScalarField& a, const ScalarField& b);
/// Dealiased v . grad(f) in convective form.
ScalarField convect(const VectorField2& v, const ScalarField& f);

/// Stream function psi with laplacian(psi) = omega and zero mean.
ScalarField stream_function(const ScalarField& omega);

/// Velocity u = grad_perp(psi), laplacian(psi) = omega, so that curl u = omega
/// and div u = 0. The mean of omega is removed first; if it exceeded
/// 1e-10 * max|omega| a warning is appended to `log`.
VectorField2 biot_savart(const ScalarField& omega, WarningLog* log = nullptr);
Spectrum stream_spectrum(const Spectrum& omega_hat);

/// exp(-nu |k|^2 dt) applied mode by mode.
ScalarField heat_multiplier(const ScalarField& f, Real nu, Real dt);
Spectrum heat_multiplier(Spectrum s, Real nu, Real dt);
/// The multiplier table itself.
SpectralTable heat_symbol(const Grid& g, Real nu, Real dt);

/// Pressure with laplacian(Pi) = div(theta e2 - u.grad u), zero mean.
ScalarField recover_pressure(const VectorField2& u, const ScalarField& theta);

/// Leray projection onto divergence-free fields (mean mode kept).
VectorField2 leray_project(const VectorField2& v);

/// Convolution with a Gaussian of standard deviation `width`, done spectrally.
ScalarField gaussian_mollify(const ScalarField& f, Real width);

Real mean(const ScalarField& f);
/// Rectangle-rule integral over the box.
Real integral(const ScalarField& f);
/// Rectangle-rule inner product.
Real inner(const ScalarField& a, const ScalarField& b);
Real max_abs(const ScalarField& f);
Real max_abs(const VectorField2& v);
/// max |v| pointwise (Euclidean).
Real max_speed(const VectorField2& v);

}  // namespace bqp
