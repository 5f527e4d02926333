#pragma once

#include "bqp/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bqp::ifrk {

enum class Scheme { ifrk2, ifrk3 };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

/// Explicit Butcher tableau with nonnegative node differences c_i - c_j for j < i.
struct Tableau {
  std::vector<Real> c;
  std::vector<std::vector<Real>> a;
  std::vector<Real> b;
  int order = 0;
  int stages() const { return static_cast<int>(c.size()); }
};

/// Heun (order 2) or Kutta's third-order method.
const Tableau& tableau(Scheme s);

/// Bundle of spectra advanced together, each with its own diffusivity.
using State = std::vector<Spectrum>;

/// Nonlinear (explicit) part N(t, Y) for stage `stage`.
using Rhs = std::function<State(int stage, Real t, const State& y)>;
/// Called after K_1 is known, with (Y^n, K_1); lets callers build a predictor.
using FirstStageHook = std::function<void(const State& y0, const State& k1)>;
/// Applied to every stage value and to the final result (e.g. pinning means).
using Projection = std::function<void(State& y)>;

/// One step of the integrating-factor Runge-Kutta method for
/// dY/dt = nu_f lap(Y_f) + N(t, Y):
///   Y_i = E(c_i dt) Y^n + dt sum_j a_ij E((c_i - c_j) dt) K_j,
///   Y^{n+1} = E(dt) Y^n + dt sum_j b_j E((1 - c_j) dt) K_j,
/// with E(tau) = exp(nu_f lap tau) applied exactly in Fourier space.
State step(const State& y, Real t, Real dt, const std::vector<Real>& nu, Scheme scheme, const Rhs& rhs,
           const FirstStageHook& first_stage = {}, const Projection& project = {});

/// The predictor E(dt) (Y^n + dt K_1) of a single field.
Spectrum euler_predictor(const Spectrum& y0, const Spectrum& k1, Real nu, Real dt);

}  // namespace bqp::ifrk
