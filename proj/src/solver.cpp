#include "bqp/solver.hpp"

#include "bqp/lagrangian.hpp"

#include <cmath>

namespace bqp::solver {

namespace {

enum Slot { kOmega = 0 };

struct Layout {
  int theta = -1;
  int x1 = -1;
  int x2 = -1;
  std::size_t size = 1;
};

Spectrum spectral_convect(const VectorField2& u, const Spectrum& f_hat) {
  const ScalarField fx = ifft(derivative(f_hat, 1, 0));
  const ScalarField fy = ifft(derivative(f_hat, 0, 1));
  return dealias(fft(ScalarField(f_hat.grid, u.x.values * fx.values + u.y.values * fy.values)));
}

Spectrum spectral_divergence_form(const VectorField2& u, const ScalarField& f) {
  const Spectrum a = fft(ScalarField(f.grid, u.x.values * f.values));
  const Spectrum b = fft(ScalarField(f.grid, u.y.values * f.values));
  return dealias(derivative(a, 1, 0) + derivative(b, 0, 1));
}

VectorField2 velocity_from(const Spectrum& omega_hat) {
  const Spectrum psi = stream_spectrum(omega_hat);
  return VectorField2(ifft(-1.0 * derivative(psi, 0, 1)), ifft(derivative(psi, 1, 0)));
}

void pin_mean(Spectrum& s) { s.coeffs(0, 0) = 0.0; }

bool finite(const SimState& s) {
  bool ok = s.theta.values.allFinite() && s.omega.values.allFinite() && s.u.x.values.allFinite() &&
            s.u.y.values.allFinite();
  if (s.has_x) ok = ok && s.X.x.values.allFinite() && s.X.y.values.allFinite();
  if (s.has_levelset) ok = ok && s.f.values.allFinite();
  return ok;
}

SimState attempt(const SimState& s, const StepperConfig& cfg, Real dt) {
  const GridPtr& g = s.grid();
  Layout lay;
  const bool theta_spectral = cfg.theta_advection == ThetaAdvection::spectral;
  const bool x_spectral = s.has_x && cfg.x_advection == XAdvection::spectral;
  if (theta_spectral) lay.theta = static_cast<int>(lay.size++);
  if (x_spectral) {
    lay.x1 = static_cast<int>(lay.size++);
    lay.x2 = static_cast<int>(lay.size++);
  }

  ifrk::State y0(lay.size);
  std::vector<Real> nu(lay.size, 0.0);
  y0[kOmega] = fft(s.omega);
  nu[kOmega] = s.nu;
  if (theta_spectral) y0[lay.theta] = fft(s.theta);
  if (x_spectral) {
    y0[lay.x1] = fft(s.X.x);
    y0[lay.x2] = fft(s.X.y);
  }

  SimState next;
  next.nu = s.nu;
  next.has_x = s.has_x;
  next.has_levelset = s.has_levelset;
  const ifrk::Tableau& tab = ifrk::tableau(cfg.scheme);

  // Semi-Lagrangian pieces are built once the Euler predictor for u(t + dt) exists.
  auto first_stage = [&](const ifrk::State& y, const ifrk::State& k1) {
    const bool any_sl = !theta_spectral || s.has_levelset || (s.has_x && !x_spectral);
    if (!any_sl) return;
    interp::Departure dep;
    VectorField2 u_pred = s.u;
    if (cfg.advection) {
      Spectrum w_pred = ifrk::euler_predictor(y[kOmega], k1[kOmega], s.nu, dt);
      pin_mean(w_pred);
      u_pred = velocity_from(w_pred);
      dep = interp::departure_points(s.u, u_pred, dt);
    }
    if (!theta_spectral)
      next.theta = cfg.advection ? interp::resample_conservative(s.theta, dep) : s.theta;
    if (s.has_levelset) next.f = cfg.advection ? interp::resample(s.f, dep, interp::Kind::lagrange_cubic) : s.f;
    if (s.has_x && !x_spectral)
      next.X = cfg.advection ? lagrangian::evolve_X_semilagrangian(s.X, dep, s.u, u_pred, dt) : s.X;
  };

  auto rhs = [&](int stage, Real, const ifrk::State& y) {
    ifrk::State k(lay.size);
    for (auto& spec : k) spec = Spectrum(g);
    const VectorField2 u = stage == 0 ? s.u : velocity_from(y[kOmega]);

    ScalarField theta_stage;
    if (theta_spectral) {
      theta_stage = stage == 0 ? s.theta : ifft(y[lay.theta]);
    } else {
      const Real c = tab.c[stage];
      theta_stage = c == 0.0 ? s.theta : ScalarField(g, (1.0 - c) * s.theta.values + c * next.theta.values);
    }

    if (cfg.advection) {
      if (cfg.conservative_form) {
        const ScalarField w = stage == 0 ? s.omega : ifft(y[kOmega]);
        k[kOmega] = -1.0 * spectral_divergence_form(u, w);
      } else {
        k[kOmega] = -1.0 * spectral_convect(u, y[kOmega]);
      }
      if (theta_spectral) k[lay.theta] = -1.0 * spectral_convect(u, y[lay.theta]);
      if (x_spectral) {
        const VectorField2 X = stage == 0 ? s.X : VectorField2(ifft(y[lay.x1]), ifft(y[lay.x2]));
        auto kx = lagrangian::x_transport_rhs(X, u);
        k[lay.x1] = std::move(kx[0]);
        k[lay.x2] = std::move(kx[1]);
      }
    }
    if (cfg.buoyancy) k[kOmega] += dealias(derivative(fft(applied_theta(theta_stage, cfg)), 1, 0));
    return k;
  };

  auto project = [](ifrk::State& y) { pin_mean(y[kOmega]); };
  const ifrk::State out = ifrk::step(y0, s.t, dt, nu, cfg.scheme, rhs, first_stage, project);

  next.t = s.t + dt;
  next.omega = ifft(out[kOmega]);
  next.u = velocity_from(out[kOmega]);
  if (theta_spectral) next.theta = ifft(out[lay.theta]);
  if (x_spectral) next.X = VectorField2(ifft(out[lay.x1]), ifft(out[lay.x2]));
  return next;
}

}  // namespace

ThetaAdvection parse_theta_advection(const std::string& name) {
  if (name == "semi_lagrangian") return ThetaAdvection::semi_lagrangian;
  if (name == "spectral") return ThetaAdvection::spectral;
  throw ArgumentError("unknown theta advection '" + name + "' (expected semi_lagrangian or spectral)");
}

std::string theta_advection_name(ThetaAdvection a) {
  return a == ThetaAdvection::spectral ? "spectral" : "semi_lagrangian";
}

XAdvection parse_x_advection(const std::string& name) {
  if (name == "semi_lagrangian") return XAdvection::semi_lagrangian;
  if (name == "spectral") return XAdvection::spectral;
  throw ArgumentError("unknown X advection '" + name + "' (expected spectral or semi_lagrangian)");
}

std::string x_advection_name(XAdvection a) { return a == XAdvection::spectral ? "spectral" : "semi_lagrangian"; }

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw ArgumentError("stepper dt must be positive");
  if (!(cfl_target > 0.0 && cfl_target <= 0.5)) throw ArgumentError("cfl_target must lie in (0, 0.5]");
  if (!(mollifier_cells >= 0.0)) throw ArgumentError("mollifier width must be >= 0");
  if (max_halvings < 0) throw ArgumentError("max_halvings must be >= 0");
}

SimState SimState::make(ScalarField theta, ScalarField omega, Real nu) {
  if (!(nu > 0.0)) throw ArgumentError("viscosity must be positive");
  require_same_grid(theta.grid, omega.grid, "SimState");
  SimState s;
  s.nu = nu;
  Spectrum w = fft(omega);
  pin_mean(w);
  s.omega = ifft(w);
  s.u = velocity_from(w);
  s.theta = std::move(theta);
  return s;
}

Real stable_dt(const SimState& s, const StepperConfig& cfg) {
  const Real speed = max_speed(s.u);
  if (speed <= 0.0) return cfg.dt;
  return std::min(cfg.dt, cfg.cfl_target * s.grid()->spacing() / speed);
}

ScalarField applied_theta(const ScalarField& theta, const StepperConfig& cfg) {
  if (cfg.mollifier_cells == 0.0) return theta;
  return gaussian_mollify(theta, cfg.mollifier_cells * theta.grid->spacing());
}

SimState step(const SimState& s, const StepperConfig& cfg, Real dt, StepInfo* info) {
  cfg.validate();
  require_finite(s.omega, "step");
  require_finite(s.theta, "step");
  const Real h = s.grid()->spacing();
  Real trial = dt;
  for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, trial *= 0.5) {
    SimState next = attempt(s, cfg, trial);
    if (!finite(next)) continue;
    const Real speed = max_speed(next.u);
    if (cfg.advection && speed > 0.0 && trial > 2.0 * cfg.cfl_target * h / speed) continue;
    if (info) *info = {trial, halvings, speed};
    return next;
  }
  throw StepFailure("time step rejected after " + std::to_string(cfg.max_halvings) + " halvings", s.t, trial,
                    max_speed(s.u));
}

std::vector<ScalarField> solve_transport_diffusion(const ScalarField& f0, const std::function<VectorField2(Real)>& v,
                                                   const std::function<ScalarField(Real)>& g, Real nu,
                                                   const std::vector<Real>& times, Real dt, ifrk::Scheme scheme) {
  if (!(nu >= 0.0)) throw ArgumentError("transport-diffusion: nu must be >= 0");
  if (!(dt > 0.0)) throw ArgumentError("transport-diffusion: dt must be positive");
  require_finite(f0, "transport-diffusion");
  const ifrk::Rhs rhs = [&](int, Real t, const ifrk::State& y) {
    ifrk::State k{Spectrum(f0.grid)};
    if (v) k[0] = -1.0 * spectral_divergence_form(v(t), ifft(y[0]));
    if (g) k[0] += fft(g(t));
    return k;
  };
  std::vector<ScalarField> out;
  ifrk::State y{fft(f0)};
  Real t = 0.0;
  for (Real target : times) {
    if (target < t) throw ArgumentError("transport-diffusion: output times must be ascending and >= 0");
    while (t < target) {
      const Real remaining = target - t;
      const int pieces = static_cast<int>(std::ceil(remaining / dt - 1e-9));
      const Real h = remaining / std::max(pieces, 1);
      y = ifrk::step(y, t, h, {nu}, scheme, rhs);
      t = (pieces <= 1) ? target : t + h;
    }
    ScalarField f = ifft(y[0]);
    require_finite(f, "transport-diffusion");
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Real> record_times(Real T, Real interval) {
  if (!(T >= 0.0)) throw ArgumentError("final time must be >= 0");
  if (!(interval > 0.0)) throw ArgumentError("record interval must be positive");
  std::vector<Real> out{0.0};
  for (long k = 1;; ++k) {
    const Real t = static_cast<Real>(k) * interval;
    if (t >= T * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  if (T > 0.0) out.push_back(T);
  return out;
}

SimState run(SimState s, const RunControl& control, const RunHooks& hooks) {
  control.stepper.validate();
  const std::vector<Real> records = record_times(control.T, control.record_interval);
  if (hooks.on_record) hooks.on_record(s);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Real target = records[r];
    while (s.t < target) {
      Real dt = stable_dt(s, control.stepper);
      const bool last = target - s.t <= dt * (1.0 + 1e-9);
      if (last) dt = target - s.t;
      StepInfo info;
      SimState next = step(s, control.stepper, dt, &info);
      if (last && info.halvings == 0) next.t = target;
      if (hooks.on_step) hooks.on_step(s, next, info);
      s = std::move(next);
    }
    if (hooks.on_record) hooks.on_record(s);
  }
  return s;
}

}  // namespace bqp::solver
