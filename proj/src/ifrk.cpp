#include "bqp/ifrk.hpp"

namespace bqp::ifrk {

Scheme parse_scheme(const std::string& name) {
  if (name == "IFRK2" || name == "ifrk2") return Scheme::ifrk2;
  if (name == "IFRK3" || name == "ifrk3") return Scheme::ifrk3;
  throw ArgumentError("unknown time scheme '" + name + "' (expected IFRK2 or IFRK3)");
}

std::string scheme_name(Scheme s) { return s == Scheme::ifrk2 ? "IFRK2" : "IFRK3"; }

const Tableau& tableau(Scheme s) {
  static const Tableau heun{{0.0, 1.0}, {{}, {1.0}}, {0.5, 0.5}, 2};
  static const Tableau kutta{{0.0, 0.5, 1.0}, {{}, {0.5}, {-1.0, 2.0}}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 3};
  return s == Scheme::ifrk2 ? heun : kutta;
}

Spectrum euler_predictor(const Spectrum& y0, const Spectrum& k1, Real nu, Real dt) {
  Spectrum out = y0;
  out.coeffs += dt * k1.coeffs;
  return heat_multiplier(std::move(out), nu, dt);
}

State step(const State& y, Real t, Real dt, const std::vector<Real>& nu, Scheme scheme, const Rhs& rhs,
           const FirstStageHook& first_stage, const Projection& project) {
  if (nu.size() != y.size()) throw ArgumentError("ifrk::step: one diffusivity per field required");
  if (!(dt > 0.0)) throw ArgumentError("ifrk::step: dt must be positive");
  const Tableau& tab = tableau(scheme);
  const int s = tab.stages();
  const std::size_t fields = y.size();

  auto propagate = [&](const Spectrum& v, std::size_t f, Real tau) {
    if (tau == 0.0 || nu[f] == 0.0) return v;
    return heat_multiplier(v, nu[f], tau);
  };

  std::vector<State> k(s);
  k[0] = rhs(0, t, y);
  if (k[0].size() != fields) throw ArgumentError("ifrk::step: right-hand side returned wrong field count");
  if (first_stage) first_stage(y, k[0]);
  for (int i = 1; i < s; ++i) {
    State yi(fields);
    for (std::size_t f = 0; f < fields; ++f) {
      Spectrum acc = propagate(y[f], f, tab.c[i] * dt);
      for (int j = 0; j < i; ++j) {
        if (tab.a[i][j] == 0.0) continue;
        Spectrum term = propagate(k[j][f], f, (tab.c[i] - tab.c[j]) * dt);
        acc.coeffs += (dt * tab.a[i][j]) * term.coeffs;
      }
      yi[f] = std::move(acc);
    }
    if (project) project(yi);
    k[i] = rhs(i, t + tab.c[i] * dt, yi);
    if (k[i].size() != fields) throw ArgumentError("ifrk::step: right-hand side returned wrong field count");
  }

  State out(fields);
  for (std::size_t f = 0; f < fields; ++f) {
    Spectrum acc = propagate(y[f], f, dt);
    for (int j = 0; j < s; ++j) {
      Spectrum term = propagate(k[j][f], f, (1.0 - tab.c[j]) * dt);
      acc.coeffs += (dt * tab.b[j]) * term.coeffs;
    }
    out[f] = std::move(acc);
  }
  if (project) project(out);
  return out;
}

}  // namespace bqp::ifrk
