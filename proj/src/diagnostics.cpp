#include "bqp/diagnostics.hpp"

#include "bqp/contour.hpp"
#include "bqp/flows.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

namespace bqp::diag {

namespace {

using lp::BesovSpec;
using lp::kInf;
using interp::Vec2;

Real besov(const ScalarField& f, Real s, Real p, Real r) { return lp::besov_norm(f, BesovSpec{s, p, r}); }
Real besov(const VectorField2& v, Real s, Real p, Real r) { return lp::besov_norm(v, BesovSpec{s, p, r}); }
Real holder(const ScalarField& f, Real s) { return lp::besov_norm(f, BesovSpec::holder(s)); }
Real holder(const VectorField2& v, Real s) { return lp::besov_norm(v, BesovSpec::holder(s)); }

Real max_gradient(const VectorField2& v) {
  const VectorField2 gx = gradient(v.x);
  const VectorField2 gy = gradient(v.y);
  return std::max(max_abs(gx), max_abs(gy));
}

Real trapezoid(Real dt, Real a, Real b) { return 0.5 * dt * (a + b); }

Sides finish(Real lhs, Real rhs, const char* degenerate) {
  Sides out{lhs, rhs};
  if (rhs == 0.0) out.status = degenerate;
  return out;
}

VectorField2 directional(const VectorField2& X, const VectorField2& v) {
  return VectorField2(lp::directional_derivative(X, v.x), lp::directional_derivative(X, v.y));
}

VectorField2 para_vector(const VectorField2& X, const VectorField2& v) {
  return VectorField2(lp::para_vector_field(X, v.x), lp::para_vector_field(X, v.y));
}

}  // namespace

// ---------------------------------------------------------------- energy

EnergySample energy_sample(const solver::SimState& s, const solver::StepperConfig& cfg) {
  EnergySample e;
  e.t = s.t;
  e.kinetic = inner(s.u.x, s.u.x) + inner(s.u.y, s.u.y);
  // For mean-free periodic fields the enstrophy equals ||grad u||^2.
  e.dissipation = inner(s.omega, s.omega);
  e.work = cfg.buoyancy ? inner(solver::applied_theta(s.theta, cfg), s.u.y) : 0.0;
  return e;
}

Real energy_equality_residual(const std::vector<EnergySample>& history, Real nu) {
  if (history.empty()) throw ArgumentError("energy residual needs at least one sample");
  Real dissipation = 0.0, work = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const Real dt = history[i].t - history[i - 1].t;
    if (!(dt > 0.0)) throw ArgumentError("energy history times must increase");
    dissipation += trapezoid(dt, history[i - 1].dissipation, history[i].dissipation);
    work += trapezoid(dt, history[i - 1].work, history[i].work);
  }
  return history.back().kinetic + 2.0 * nu * dissipation - history.front().kinetic - 2.0 * work;
}

// ------------------------------------------------------------- striated

void StriatedParams::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("striated diagnostics need 0 < eps < 1");
  if (!(q > 1.0 && q < 2.0 / (2.0 - eps)))
    throw ArgumentError("striated diagnostics need 1 < q < 2/(2 - eps), i.e. eps/2 + 1/q > 1 (got eps = " +
                        format_real(eps) + ", q = " + format_real(q) + ")");
}

StepQuantities step_quantities(const solver::SimState& s, const solver::StepperConfig& cfg, const StriatedParams& p) {
  StepQuantities q;
  q.energy = energy_sample(s, cfg);
  const VectorField2 gx = gradient(s.u.x);
  const VectorField2 gy = gradient(s.u.y);
  q.grad_u_linf = std::max(max_abs(gx), max_abs(gy));
  q.grad_u_besov = std::max(besov(gx, 2.0 / p.q, p.q, 1.0), besov(gy, 2.0 / p.q, p.q, 1.0));
  q.omega_besov = besov(s.omega, 2.0 / p.q, p.q, 1.0);
  q.theta_besov = besov(s.theta, 2.0 / p.q - 1.0, p.q, 1.0);
  return q;
}

void TimeIntegrals::add(const StepQuantities& q) {
  if (count_ == 0) {
    first_ = q;
  } else {
    const Real dt = q.energy.t - last_.energy.t;
    if (!(dt > 0.0)) throw ArgumentError("time integrals need increasing times");
    dissipation_ += trapezoid(dt, last_.energy.dissipation, q.energy.dissipation);
    work_ += trapezoid(dt, last_.energy.work, q.energy.work);
    v_ += trapezoid(dt, last_.grad_u_linf, q.grad_u_linf);
    uq_ += trapezoid(dt, last_.grad_u_besov, q.grad_u_besov);
    w_rest_ += trapezoid(dt, last_.omega_besov + last_.theta_besov, q.omega_besov + q.theta_besov);
  }
  last_ = q;
  ++count_;
}

Real TimeIntegrals::energy_residual() const {
  if (count_ == 0) throw ArgumentError("energy residual needs at least one sample");
  return last_.energy.kinetic + 2.0 * nu_ * dissipation_ - first_.energy.kinetic - 2.0 * work_;
}

ScalarField div_product(const VectorField2& X, const ScalarField& w) {
  const Spectrum a = fft(ScalarField(w.grid, X.x.values * w.values));
  const Spectrum b = fft(ScalarField(w.grid, X.y.values * w.values));
  return ifft(dealias(derivative(a, 1, 0) + derivative(b, 0, 1)));
}

ScalarField weak_directional_derivative(const VectorField2& X, const ScalarField& theta) {
  const ScalarField div_x = divergence(X);
  const ScalarField correction(theta.grid, theta.values * div_x.values);
  return div_product(X, theta) - dealias(correction);
}

StriatedNorms striated_norms(const solver::SimState& s, const StriatedParams& p) {
  p.validate();
  StriatedNorms out;
  const ScalarField dxw = div_product(s.X, s.omega);
  out.X_holder = holder(s.X, p.eps);
  out.divXomega_m1 = holder(dxw, p.eps - 1.0);
  out.divXomega_m3 = holder(dxw, p.eps - 3.0);
  out.dXtheta_m2 = holder(weak_directional_derivative(s.X, s.theta), p.eps - 2.0);
  out.dXu_holder = holder(directional(s.X, s.u), p.eps);
  out.omega_low = besov(s.omega, 2.0 / p.q - 2.0, p.q, 1.0);
  out.omega_high = besov(s.omega, 2.0 / p.q, p.q, 1.0);
  out.theta_besov = besov(s.theta, 2.0 / p.q - 1.0, p.q, 1.0);
  return out;
}

Real ZTracker::add(const StriatedNorms& n) {
  x_sup_ = std::max(x_sup_, n.X_holder);
  d_sup_ = std::max(d_sup_, n.divXomega_m3);
  return value();
}

Real DiagnosticsRecord::get(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw ArgumentError("no diagnostics column '" + name + "'");
}

DiagnosticsRecord make_record(const solver::SimState& s, const TimeIntegrals& integrals, ZTracker& z,
                              const StriatedParams& p) {
  if (integrals.empty() || integrals.t() != s.t)
    throw ArgumentError("diagnostics record: time integrals must end at the state time");
  StriatedNorms full;
  if (s.has_x) {
    full = striated_norms(s, p);
  } else {
    p.validate();
    full.omega_low = besov(s.omega, 2.0 / p.q - 2.0, p.q, 1.0);
    full.omega_high = besov(s.omega, 2.0 / p.q, p.q, 1.0);
    full.theta_besov = besov(s.theta, 2.0 / p.q - 1.0, p.q, 1.0);
  }
  z.add(full);

  const Real residual = integrals.energy_residual();
  const Real k0 = integrals.initial_kinetic();
  const Real kinetic = inner(s.u.x, s.u.x) + inner(s.u.y, s.u.y);
  const Real scale = k0 > 0.0 ? k0 : kinetic;

  DiagnosticsRecord r;
  r.t = s.t;
  auto& v = r.values;
  v.emplace_back("energy_residual", residual);
  v.emplace_back("energy_residual_rel", scale > 0.0 ? std::abs(residual) / scale : std::abs(residual));
  v.emplace_back("l2_u", std::sqrt(kinetic));
  v.emplace_back("grad_u_l2sq", inner(s.omega, s.omega));
  v.emplace_back("grad_u_linf", max_gradient(s.u));
  v.emplace_back("theta_l1", lp::lp_norm(s.theta, 1.0));
  v.emplace_back("theta_l2", lp::lp_norm(s.theta, 2.0));
  v.emplace_back("theta_linf", lp::lp_norm(s.theta, kInf));
  v.emplace_back("theta_mass", integral(s.theta));
  v.emplace_back("omega_mean", mean(s.omega));
  v.emplace_back("div_x_linf", s.has_x ? max_abs(divergence(s.X)) : 0.0);
  v.emplace_back("grad_x_linf", s.has_x ? max_gradient(s.X) : 0.0);
  v.emplace_back("V", integrals.V());
  v.emplace_back("U_q", integrals.U_q());
  v.emplace_back("W", integrals.W());
  v.emplace_back("Z", z.value());
  v.emplace_back("X_Ceps", full.X_holder);
  v.emplace_back("divXomega_Ceps_m1", full.divXomega_m1);
  v.emplace_back("divXomega_Ceps_m3", full.divXomega_m3);
  v.emplace_back("dXtheta_Ceps_m2", full.dXtheta_m2);
  v.emplace_back("dXu_Ceps", full.dXu_holder);
  v.emplace_back("omega_B_2q_m2", full.omega_low);
  v.emplace_back("omega_B_2q", full.omega_high);
  v.emplace_back("theta_B_2q_m1", full.theta_besov);
  return r;
}

std::vector<std::string> record_columns() {
  return {"energy_residual",   "energy_residual_rel", "l2_u",          "grad_u_l2sq",       "grad_u_linf",
          "theta_l1",          "theta_l2",            "theta_linf",    "theta_mass",        "omega_mean",
          "div_x_linf",        "grad_x_linf",         "V",             "U_q",               "W",
          "Z",                 "X_Ceps",              "divXomega_Ceps_m1", "divXomega_Ceps_m3", "dXtheta_Ceps_m2",
          "dXu_Ceps",          "omega_B_2q_m2",       "omega_B_2q",    "theta_B_2q_m1"};
}

std::string format_real(Real v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_record_header(std::ostream& os) {
  os << "config_hash,t";
  for (const auto& c : record_columns()) os << ',' << c;
  os << '\n';
}

void write_record(std::ostream& os, const DiagnosticsRecord& r, const std::string& config_hash) {
  os << config_hash << ',' << format_real(r.t);
  for (const auto& [k, v] : r.values) os << ',' << format_real(v);
  os << '\n';
}

// ------------------------------------------------------------- geometry

GeometryRecord geometry_record(const solver::SimState& s, const lagrangian::PatchState& patch, Real area0,
                               Real level_band, Real eps) {
  GeometryRecord g;
  g.t = s.t;
  g.area = patch.area();
  g.area_drift = std::abs(g.area - area0) / std::abs(area0);
  g.det_defect = patch.max_det_defect();
  g.redistributions = patch.redistributions;
  g.boundary = lagrangian::boundary_c1eps_norm(patch, eps);
  g.theta_linf = max_abs(s.theta);

  if (s.has_x) {
    const interp::HermiteField hx(s.X.x), hy(s.X.y);
    const auto tangents = patch.tangents();
    const auto lag = lagrangian::X_from_jacobian(patch);
    Real dev = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < patch.size(); ++i) {
      const Vec2& m = patch.markers[i];
      const Vec2 xe(hx.value(m.x(), m.y()), hy.value(m.x(), m.y()));
      const Vec2& t = tangents[i];
      const Real denom = xe.norm() * t.norm();
      if (denom > 0.0) g.tangency_sin = std::max(g.tangency_sin, std::abs(xe.x() * t.y() - xe.y() * t.x()) / denom);
      dev = std::max(dev, (xe - lag[i]).norm());
      scale = std::max(scale, lag[i].norm());
    }
    g.cross_rep = scale > 0.0 ? dev / scale : dev;
    const Real grad = max_gradient(s.X);
    g.div_x_ratio = grad > 0.0 ? max_abs(divergence(s.X)) / grad : 0.0;
  }
  if (s.has_levelset) {
    const Values mask = lagrangian::LevelSet{s.f, level_band}.band_mask();
    const auto pieces = contour::zero_contour(s.f, &mask);
    contour::Polyline poly{patch.markers, true};
    g.hausdorff = pieces.empty() ? kInf : contour::hausdorff_distance(pieces, {poly}, s.grid()->length());
  }
  return g;
}

void write_geometry_header(std::ostream& os) {
  os << "config_hash,t,area,area_drift,det_defect,redistributions,boundary_c1,boundary_holder,boundary_c1eps,"
        "arc_chord,tangency_sin,cross_rep,hausdorff,theta_linf,div_x_ratio\n";
}

void write_geometry(std::ostream& os, const GeometryRecord& r, const std::string& config_hash) {
  os << config_hash << ',' << format_real(r.t) << ',' << format_real(r.area) << ',' << format_real(r.area_drift)
     << ',' << format_real(r.det_defect) << ',' << r.redistributions << ',' << format_real(r.boundary.c1) << ','
     << format_real(r.boundary.holder) << ',' << format_real(r.boundary.total()) << ','
     << format_real(r.boundary.arc_chord) << ',' << format_real(r.tangency_sin) << ',' << format_real(r.cross_rep)
     << ',' << format_real(r.hausdorff) << ',' << format_real(r.theta_linf) << ',' << format_real(r.div_x_ratio)
     << '\n';
}

// ---------------------------------------------------------------- probes

Sides commutator_sides(const ScalarField& g, const ScalarField& u, Real eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("commutator probe needs 0 < eps < 1");
  constexpr Real s = 0.5, m = 1.0;
  const ScalarField a = lp::paraproduct(g, derivative(u, 1, 0));
  const ScalarField b = derivative(lp::paraproduct(g, u), 1, 0);
  const Real lhs = besov(a - b, s - m + eps, 2.0, 2.0);
  const Real rhs = holder(gradient(g), eps - 1.0) * besov(u, s, 2.0, 2.0);
  return finish(lhs, rhs, "degenerate: grad g = 0");
}

Sides para_vector_sides(const VectorField2& X, const ScalarField& f, Real eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("para-vector probe needs 0 < eps < 1");
  constexpr Real s = 1.0, p = 2.0, r = 1.0;
  if (!(s + eps > 1.0)) throw ArgumentError("para-vector probe needs s + eps > 1");
  const ScalarField diff = lp::para_vector_field(X, f) - lp::directional_derivative(X, f);
  const Real lhs = holder(diff, s + eps - 2.0 / p - 1.0);
  const Real rhs = holder(X, eps) * besov(gradient(f), s - 1.0, p, r);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

Sides transport_commutator_sides(const VectorField2& X, const VectorField2& v, Real eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("transport commutator probe needs 0 < eps < 1");
  constexpr Real p = 2.0;  // N/p + eps >= 1 holds for N = 2
  // d_t v cancels in the commutator; only d_t X enters, through the transport law of X.
  const VectorField2 dtX = directional(X, v) - directional(v, X);
  const VectorField2 txv = para_vector(X, v);
  const VectorField2 comm = para_vector(X, directional(v, v)) - para_vector(dtX, v) - directional(v, txv);
  const Real lhs = holder(comm, eps - 2.0);
  const Real x_tilde = holder(X, eps) + holder(divergence(X), eps);
  const Real v_high = besov(v, 2.0 / p + 1.0, p, 1.0);
  const Real v_low = besov(v, 2.0 / p - 1.0, p, 1.0);
  const Real rhs = x_tilde * v_high * v_low + holder(v, -1.0) * holder(txv, eps) + v_high * holder(txv, eps - 2.0);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

Sides striated_velocity_sides(const VectorField2& X, const ScalarField& omega, Real eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("striated velocity probe needs 0 < eps < 1");
  const VectorField2 u = biot_savart(omega);
  const Real lhs = holder(directional(X, u), eps);
  const Real rhs = max_gradient(u) * holder(X, eps) + holder(div_product(X, omega), eps - 1.0);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

Sides compat_vorticity_sides(const VectorField2& X, const ScalarField& omega, const StriatedParams& p) {
  p.validate();
  const Real lhs = holder(div_product(X, omega), -3.0);
  const Real rhs = holder(X, p.eps) * besov(omega, 2.0 / p.q - 2.0, p.q, 1.0);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

Sides compat_temperature_sides(const VectorField2& X, const ScalarField& theta, const StriatedParams& p) {
  p.validate();
  const Real lhs = holder(weak_directional_derivative(X, theta), -2.0);
  const Real rhs = holder(X, p.eps) * besov(theta, 2.0 / p.q - 1.0, p.q, 1.0);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

const std::vector<std::string>& probe_ids() {
  static const std::vector<std::string> ids{"commutator",        "para_vector",      "transport_commutator",
                                            "striated_velocity", "compat_vorticity", "compat_temperature"};
  return ids;
}

void EnsembleConfig::validate() const {
  if (size < 32) throw ArgumentError("ensemble size must be >= 32 (got " + std::to_string(size) + ")");
  if (band < 0) throw ArgumentError("ensemble band must be >= 0");
  if (threads < 1) throw ArgumentError("ensemble needs at least one worker thread");
  params.validate();
}

namespace {

Sides evaluate_probe(const std::string& id, const GridPtr& g, int band, const StriatedParams& p,
                     std::mt19937_64& rng) {
  using random::gaussian_field;
  using random::gaussian_vector;
  if (id == "commutator") {
    const ScalarField gf = gaussian_field(g, {band, 2.0}, rng);
    return commutator_sides(gf, gaussian_field(g, {band, 1.0}, rng), p.eps);
  }
  if (id == "para_vector") {
    const VectorField2 X = gaussian_vector(g, {band, 1.5}, rng);
    return para_vector_sides(X, gaussian_field(g, {band, 2.0}, rng), p.eps);
  }
  if (id == "transport_commutator") {
    const VectorField2 X = gaussian_vector(g, {band, 1.5}, rng);
    return transport_commutator_sides(X, random::gaussian_solenoidal(g, {band, 1.5}, rng), p.eps);
  }
  if (id == "striated_velocity") {
    const VectorField2 X = gaussian_vector(g, {band, 1.5}, rng);
    return striated_velocity_sides(X, gaussian_field(g, {band, 1.0}, rng), p.eps);
  }
  if (id == "compat_vorticity") {
    const VectorField2 X = gaussian_vector(g, {band, 1.5}, rng);
    return compat_vorticity_sides(X, gaussian_field(g, {band, 0.5}, rng), p);
  }
  if (id == "compat_temperature") {
    const VectorField2 X = gaussian_vector(g, {band, 1.5}, rng);
    return compat_temperature_sides(X, gaussian_field(g, {band, 1.0}, rng), p);
  }
  throw ArgumentError("unknown probe '" + id + "'");
}

std::mt19937_64 sample_rng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

Real percentile(std::vector<Real> v, Real q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<Real>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

bool usable(const Sides& s) { return s.status == "ok"; }

// Highest product degree in the probe's two sides; with band <= cutoff / degree
// every product is resolved on the base grid, so n and 2n see the same values.
int product_degree(const std::string& id) { return id == "transport_commutator" ? 3 : 2; }

}  // namespace

ProbeReport inequality_probe(const std::string& probe, const EnsembleConfig& cfg) {
  cfg.validate();
  if (std::find(probe_ids().begin(), probe_ids().end(), probe) == probe_ids().end())
    throw ArgumentError("unknown probe '" + probe + "'");
  const GridPtr base = Grid::make(cfg.n);
  const GridPtr fine = Grid::make(2 * cfg.n);
  const int band = cfg.band == 0 ? base->dealias_cutoff() / product_degree(probe) : cfg.band;

  // Samples are independent; workers fill fixed slots and the merge below runs in index order.
  std::vector<ProbeSample> samples(static_cast<std::size_t>(cfg.size));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.size; i = next++) {
      ProbeSample& s = samples[static_cast<std::size_t>(i)];
      s.index = i;
      auto rng = sample_rng(cfg.seed, i);
      s.base = evaluate_probe(probe, base, band, cfg.params, rng);
      rng = sample_rng(cfg.seed, i);
      s.refined = evaluate_probe(probe, fine, band, cfg.params, rng);
    }
  };
  const int workers = std::min(cfg.threads, cfg.size);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ProbeReport r;
  r.probe = probe;
  r.config = cfg;
  std::vector<Real> ratios;
  for (const ProbeSample& s : samples) {
    if (usable(s.base)) {
      const Real a = s.base.ratio();
      r.all_finite = r.all_finite && std::isfinite(a);
      ratios.push_back(a);
      r.max_ratio = std::max(r.max_ratio, a);
    }
    if (usable(s.refined)) {
      const Real b = s.refined.ratio();
      r.all_finite = r.all_finite && std::isfinite(b);
      r.max_ratio_refined = std::max(r.max_ratio_refined, b);
    }
  }
  r.samples = std::move(samples);
  r.p50 = percentile(ratios, 0.5);
  r.p90 = percentile(ratios, 0.9);
  r.p99 = percentile(ratios, 0.99);
  r.growth = r.max_ratio > 0.0 ? r.max_ratio_refined / r.max_ratio : 0.0;
  return r;
}

void write_probe_csv(std::ostream& os, const ProbeReport& r, const std::string& config_hash) {
  os << "config_hash,probe,row,status,n,lhs,rhs,ratio,lhs_2n,rhs_2n,ratio_2n,p50,p90,p99,growth\n";
  for (const auto& s : r.samples) {
    os << config_hash << ',' << r.probe << ',' << s.index << ',' << s.base.status << ',' << r.config.n << ','
       << format_real(s.base.lhs) << ',' << format_real(s.base.rhs) << ','
       << (usable(s.base) ? format_real(s.base.ratio()) : "") << ',' << format_real(s.refined.lhs) << ','
       << format_real(s.refined.rhs) << ',' << (usable(s.refined) ? format_real(s.refined.ratio()) : "")
       << ",,,,\n";
  }
  os << config_hash << ',' << r.probe << ",summary," << (r.all_finite ? "ok" : "nonfinite") << ',' << r.config.n
     << ",,," << format_real(r.max_ratio) << ",,," << format_real(r.max_ratio_refined) << ',' << format_real(r.p50)
     << ',' << format_real(r.p90) << ',' << format_real(r.p99) << ',' << format_real(r.growth) << '\n';
}

// ------------------------------------------------- transport-diffusion bounds

void TransDiffSweep::validate() const {
  if (!(nu > 0.0)) throw ArgumentError("transport-diffusion sweep needs nu > 0");
  if (!(T > 0.0 && dt > 0.0 && output_dt > 0.0)) throw ArgumentError("transport-diffusion sweep needs T, dt, output_dt > 0");
  // With p1 = inf the admissible range -1 - min(N/p1, N/p') < s < 1 + min(N/p, N/p1) is -1 < s < 1.
  for (Real s : s_values)
    if (!(s > -1.0 && s < 1.0))
      throw ArgumentError("inadmissible s = " + format_real(s) +
                          ": need -1 - min(N/p1, N/p') < s < 1 + min(N/p, N/p1), i.e. -1 < s < 1 for p1 = inf");
  for (Real p : p_values)
    if (!(p >= 1.0)) throw ArgumentError("Besov p must be >= 1");
  for (Real r : r_values)
    if (!(r >= 1.0)) throw ArgumentError("Besov r must be >= 1");
  for (Real rho : rho_values)
    if (!(rho >= 1.0)) throw ArgumentError("time exponent rho must be >= 1");
  if (families.empty()) throw ArgumentError("transport-diffusion sweep needs at least one velocity family");
}

Real velocity_gradient_integral(const std::function<VectorField2(Real)>& v, const std::vector<Real>& times,
                                bool besov_part) {
  Real total = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const VectorField2 u = v(times[i]);
    const VectorField2 gx = gradient(u.x), gy = gradient(u.y);
    Real a = std::max(max_abs(gx), max_abs(gy));
    if (besov_part) a += std::max(holder(gx, 0.0), holder(gy, 0.0));
    if (i > 0) total += trapezoid(times[i] - times[i - 1], prev, a);
    prev = a;
  }
  return total;
}

Real smoothing_lhs(const std::vector<ScalarField>& traj, const std::vector<Real>& times, const lp::BesovSpec& spec,
                   Real rho, Real nu) {
  if (traj.size() != times.size()) throw ArgumentError("trajectory and times differ in length");
  const Real inv_rho = std::isinf(rho) ? 0.0 : 1.0 / rho;
  lp::TimeNormAccumulator acc({spec.s + 2.0 * inv_rho, spec.p, spec.r}, rho);
  for (std::size_t i = 0; i < traj.size(); ++i) acc.add(times[i], traj[i]);
  return std::pow(nu, inv_rho) * acc.tilde_norm();
}

namespace {

struct FamilyRun {
  Real v_smooth = 0.0;  // V_{p1} with p1 = inf
  Real v_lip = 0.0;     // int ||grad v||_inf
  // block norms per p, per output time
  std::vector<std::vector<std::vector<Real>>> blocks_nu, blocks_0;
  std::vector<std::vector<Real>> blocks_init;
};

FamilyRun run_family(const TransDiffSweep& sw, const std::string& family, int n, const std::vector<Real>& times) {
  const GridPtr g = Grid::make(n);
  std::mt19937_64 rng(sw.seed);
  const ScalarField f0 = random::gaussian_field(g, sw.envelope, rng);
  const auto fam = flows::family(family, g);
  FamilyRun out;
  out.v_smooth = velocity_gradient_integral(fam.velocity, times, true);
  out.v_lip = velocity_gradient_integral(fam.velocity, times, false);
  // IFRK3 covers part of the imaginary axis, which the inviscid runs need.
  Real speed = 0.0;
  for (Real t : times) speed = std::max(speed, max_speed(fam.velocity(t)));
  const Real dt = speed > 0.0 ? std::min(sw.dt, 0.5 * g->spacing() / speed) : sw.dt;
  const auto scheme = ifrk::Scheme::ifrk3;
  const auto traj_nu = solver::solve_transport_diffusion(f0, fam.velocity, nullptr, sw.nu, times, dt, scheme);
  const auto traj_0 = solver::solve_transport_diffusion(f0, fam.velocity, nullptr, 0.0, times, dt, scheme);
  for (Real p : sw.p_values) {
    std::vector<std::vector<Real>> a, b;
    for (std::size_t i = 0; i < times.size(); ++i) {
      a.push_back(lp::block_norms(traj_nu[i], p));
      b.push_back(lp::block_norms(traj_0[i], p));
    }
    out.blocks_nu.push_back(std::move(a));
    out.blocks_0.push_back(std::move(b));
    out.blocks_init.push_back(lp::block_norms(f0, p));
  }
  return out;
}

Real tilde_from_blocks(const std::vector<std::vector<Real>>& blocks, const std::vector<Real>& times,
                       const lp::BesovSpec& spec, Real rho) {
  lp::TimeNormAccumulator acc(spec, rho);
  for (std::size_t i = 0; i < times.size(); ++i) acc.add(times[i], blocks[i]);
  return acc.tilde_norm();
}

Sides smoothing_sides(const TransDiffSweep& sw, const FamilyRun& fr, std::size_t ip, const std::vector<Real>& times,
                      Real s, Real r, Real rho) {
  const Real p = sw.p_values[ip];
  const Real inv_rho = std::isinf(rho) ? 0.0 : 1.0 / rho;
  const Real lhs = std::pow(sw.nu, inv_rho) * tilde_from_blocks(fr.blocks_nu[ip], times, {s + 2.0 * inv_rho, p, r}, rho);
  const Real growth = std::pow(1.0 + sw.nu * sw.T, inv_rho);
  const Real rhs = std::exp(growth * fr.v_smooth) * growth * lp::aggregate(fr.blocks_init[ip], s, r);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

Sides transport_sides(const TransDiffSweep& sw, const FamilyRun& fr, std::size_t ip, const std::vector<Real>& times,
                      Real r) {
  const Real p = sw.p_values[ip];
  const Real lhs = tilde_from_blocks(fr.blocks_0[ip], times, {0.0, p, r}, kInf);
  const Real rhs = lp::aggregate(fr.blocks_init[ip], 0.0, r) * (1.0 + fr.v_lip);
  return finish(lhs, rhs, "degenerate: right side vanishes");
}

}  // namespace

TransDiffReport trans_diff_bound_probe(const TransDiffSweep& sw) {
  sw.validate();
  std::vector<Real> times;
  const auto steps = static_cast<long>(std::llround(sw.T / sw.output_dt));
  for (long k = 0; k <= steps; ++k) times.push_back(std::min(sw.T, static_cast<Real>(k) * sw.output_dt));
  if (times.back() < sw.T) times.push_back(sw.T);

  TransDiffReport rep;
  for (const auto& family : sw.families) {
    const FamilyRun base = run_family(sw, family, sw.n, times);
    const FamilyRun fine = run_family(sw, family, 2 * sw.n, times);
    for (std::size_t ip = 0; ip < sw.p_values.size(); ++ip) {
      for (Real r : sw.r_values) {
        for (Real s : sw.s_values) {
          for (Real rho : sw.rho_values) {
            TransDiffRow row{family, "smoothing", {s, sw.p_values[ip], r}, rho,
                             smoothing_sides(sw, base, ip, times, s, r, rho),
                             smoothing_sides(sw, fine, ip, times, s, r, rho)};
            rep.rows.push_back(row);
          }
        }
        rep.rows.push_back({family, "transport", {0.0, sw.p_values[ip], r}, kInf, transport_sides(sw, base, ip, times, r),
                            transport_sides(sw, fine, ip, times, r)});
      }
    }
  }
  for (const auto& row : rep.rows) {
    const Real a = row.base.ratio(), b = row.refined.ratio();
    rep.all_finite = rep.all_finite && std::isfinite(a) && std::isfinite(b) && row.base.status == "ok" &&
                     row.refined.status == "ok";
    rep.max_ratio = std::max({rep.max_ratio, a, b});
    rep.max_growth = std::max(rep.max_growth, row.growth());
  }
  return rep;
}

void write_transdiff_csv(std::ostream& os, const TransDiffReport& r, const std::string& config_hash) {
  os << "config_hash,family,bound,s,p,r,rho,lhs,rhs,ratio,lhs_2n,rhs_2n,ratio_2n,growth\n";
  for (const auto& row : r.rows) {
    os << config_hash << ',' << row.family << ',' << row.bound << ',' << format_real(row.spec.s) << ','
       << format_real(row.spec.p) << ',' << format_real(row.spec.r) << ',' << format_real(row.rho) << ','
       << format_real(row.base.lhs) << ',' << format_real(row.base.rhs) << ',' << format_real(row.base.ratio()) << ','
       << format_real(row.refined.lhs) << ',' << format_real(row.refined.rhs) << ','
       << format_real(row.refined.ratio()) << ',' << format_real(row.growth()) << '\n';
  }
  os << config_hash << ",summary," << (r.all_finite ? "ok" : "nonfinite") << ",,,,,,," << format_real(r.max_ratio)
     << ",,,," << format_real(r.max_growth) << '\n';
}

}  // namespace bqp::diag
