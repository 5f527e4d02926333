#pragma once

#include "bqp/ifrk.hpp"
#include "bqp/interpolation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bqp::solver {

enum class ThetaAdvection { semi_lagrangian, spectral };
enum class XAdvection { spectral, semi_lagrangian };

ThetaAdvection parse_theta_advection(const std::string& name);
std::string theta_advection_name(ThetaAdvection a);
XAdvection parse_x_advection(const std::string& name);
std::string x_advection_name(XAdvection a);

struct StepperConfig {
  Real dt = 2e-3;
  Real cfl_target = 0.5;
  ifrk::Scheme scheme = ifrk::Scheme::ifrk2;
  ThetaAdvection theta_advection = ThetaAdvection::semi_lagrangian;
  XAdvection x_advection = XAdvection::spectral;
  /// Standard deviation of the buoyancy mollifier in grid spacings; 0 disables it.
  Real mollifier_cells = 2.0;
  /// false drops every u.grad and stretching term (linearized tests).
  bool advection = true;
  bool buoyancy = true;
  /// Nonlinear vorticity term as div(u omega) instead of u.grad(omega).
  bool conservative_form = false;
  int max_halvings = 10;

  void validate() const;
};

/// Time, temperature, vorticity, velocity and the transported X and level set.
struct SimState {
  Real t = 0.0;
  Real nu = 1.0;
  ScalarField theta;
  ScalarField omega;
  VectorField2 u;
  bool has_x = false;
  VectorField2 X;
  bool has_levelset = false;
  ScalarField f;

  /// State with u = biot_savart(omega); omega's mean is removed.
  static SimState make(ScalarField theta, ScalarField omega, Real nu);
  const GridPtr& grid() const { return omega.grid; }
};

struct StepInfo {
  Real dt = 0.0;
  int halvings = 0;
  Real max_speed = 0.0;
};

/// dt = min(dt_base, cfl_target h / max|u|).
Real stable_dt(const SimState& s, const StepperConfig& cfg);

/// The buoyancy forcing field: theta after the configured Gaussian mollifier.
ScalarField applied_theta(const ScalarField& theta, const StepperConfig& cfg);

/// Advances by `dt` (or by dt / 2^k after k rejected attempts). A step is
/// rejected if it produces non-finite values or if dt exceeds twice the CFL
/// limit of the new velocity. Throws StepFailure after max_halvings rejections.
SimState step(const SimState& s, const StepperConfig& cfg, Real dt, StepInfo* info = nullptr);

/// Solves d_t f + div(f v) - nu lap f = g and returns f at each requested
/// output time (ascending, >= 0). Steps are clipped to land on output times.
std::vector<ScalarField> solve_transport_diffusion(const ScalarField& f0, const std::function<VectorField2(Real)>& v,
                                                   const std::function<ScalarField(Real)>& g, Real nu,
                                                   const std::vector<Real>& times, Real dt,
                                                   ifrk::Scheme scheme = ifrk::Scheme::ifrk2);

struct RunControl {
  Real T = 1.0;
  Real record_interval = 0.02;
  StepperConfig stepper;
};

struct RunHooks {
  /// After every accepted step, with the states on both ends of it.
  std::function<void(const SimState& before, const SimState& after, const StepInfo& info)> on_step;
  /// At t = 0, at every multiple of the record interval and at T.
  std::function<void(const SimState& s)> on_record;
};

/// Step loop from s.t to T; returns the final state. Exceptions propagate.
SimState run(SimState s, const RunControl& control, const RunHooks& hooks);

/// Record times 0, dr, 2dr, ..., T.
std::vector<Real> record_times(Real T, Real interval);

}  // namespace bqp::solver
