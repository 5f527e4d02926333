#include "doctest.h"
#include "support.hpp"

#include "bqp/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace bqp;

namespace {

Real oracle_step(Real t) {
  const auto h = [](Real x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); };
  return h(t) / (h(t) + h(1.0 - t));
}

solver::SimState smooth_state(const GridPtr& g, bool with_theta) {
  const ScalarField theta = with_theta ? ScalarField::sample(g, [](Real x, Real y) {
    return 0.6 * std::sin(x) * std::cos(y) + 0.3 * std::cos(2 * x - y);
  })
                                       : ScalarField(g);
  const ScalarField omega = ScalarField::sample(g, [](Real x, Real y) { return std::cos(x + y) + 0.5 * std::sin(2 * y) * std::cos(x); });
  return solver::SimState::make(theta, omega, 0.2);
}

// |R(T)| for a run sampled at every step.
Real energy_residual(const solver::SimState& s0, solver::StepperConfig cfg, int steps, Real T) {
  cfg.dt = T / steps;
  std::vector<diag::EnergySample> hist{diag::energy_sample(s0, cfg)};
  solver::SimState s = s0;
  for (int i = 0; i < steps; ++i) {
    s = solver::step(s, cfg, cfg.dt);
    hist.push_back(diag::energy_sample(s, cfg));
  }
  return std::abs(diag::energy_equality_residual(hist, s0.nu));
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("energy residual of zero data and argument checks") {
  const GridPtr g = Grid::make(16);
  const auto s = solver::SimState::make(ScalarField(g), ScalarField(g), 1.0);
  solver::StepperConfig cfg;
  CHECK(diag::energy_equality_residual({diag::energy_sample(s, cfg)}, 1.0) == 0.0);
  CHECK(energy_residual(s, cfg, 4, 0.1) == 0.0);
  CHECK_THROWS_AS(diag::energy_equality_residual({}, 1.0), ArgumentError);
}

TEST_CASE("energy residual is second order in dt") {
  const GridPtr g = Grid::make(64);
  for (bool with_theta : {false, true}) {
    solver::StepperConfig cfg;
    cfg.theta_advection = solver::ThetaAdvection::semi_lagrangian;
    const auto s0 = smooth_state(g, with_theta);
    Real prev = energy_residual(s0, cfg, 8, 0.4);
    for (int steps : {16, 32, 64}) {
      const Real e = energy_residual(s0, cfg, steps, 0.4);
      CHECK(prev / e >= 3.5);
      prev = e;
    }
  }
}

TEST_CASE("time integrals follow the trapezoid rule") {
  diag::TimeIntegrals ti(0.5);
  diag::StepQuantities a, b;
  a.energy.t = 0.0;
  a.grad_u_linf = 1.0;
  a.grad_u_besov = 2.0;
  a.omega_besov = 1.0;
  b.energy.t = 0.5;
  b.grad_u_linf = 3.0;
  b.grad_u_besov = 4.0;
  b.theta_besov = 1.0;
  ti.add(a);
  ti.add(b);
  CHECK(ti.V() == doctest::Approx(1.0));
  CHECK(ti.U_q() == doctest::Approx(1.5));
  CHECK(ti.W() == doctest::Approx(1.5 + 0.5));
  CHECK_THROWS_AS(ti.add(a), ArgumentError);
}

TEST_CASE("striated parameters enforce eps/2 + 1/q > 1") {
  CHECK_NOTHROW(diag::StriatedParams{0.5, 1.3}.validate());
  try {
    diag::StriatedParams{0.5, 1.4}.validate();
    FAIL("expected an error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("eps/2 + 1/q > 1") != std::string::npos);
  }
  CHECK_THROWS_AS(diag::StriatedParams({1.0, 1.3}).validate(), ArgumentError);
}

TEST_CASE("zero X gives zero striated norms") {
  const GridPtr g = Grid::make(32);
  auto s = smooth_state(g, true);
  s.has_x = true;
  s.X = VectorField2(g);
  const auto n = diag::striated_norms(s, {});
  CHECK(n.X_holder == 0.0);
  CHECK(n.divXomega_m1 == 0.0);
  CHECK(n.divXomega_m3 == 0.0);
  CHECK(n.dXtheta_m2 == 0.0);
  CHECK(n.dXu_holder == 0.0);
  CHECK(n.omega_high > 0.0);
}

namespace {

struct TangencyResidual {
  Real tangent = 0.0;  // ||d_X0 theta0||_{C^{-3/2}} / (||theta0||_inf ||X0||_inf)
  Real radial = 0.0;   // same for a non-tangent field of comparable size
};

TangencyResidual tangency_residual(int n) {
  const Real c = std::numbers::pi;
  const GridPtr g = Grid::make(n);
  const ScalarField theta = ScalarField::sample(g, [c](Real x, Real y) { return std::hypot(x - c, y - c) < 1.0 ? 1.0 : 0.0; });
  const ScalarField f0 = lagrangian::levelset_from_distance(
      g, [c](Real x, Real y) { return std::hypot(x - c, y - c) - 1.0; }, 0.4);
  const VectorField2 X = lagrangian::tangent_field(f0);
  const auto spec = lp::BesovSpec::holder(-1.5);
  TangencyResidual r;
  r.tangent = lp::besov_norm(diag::weak_directional_derivative(X, theta), spec) / (max_abs(theta) * max_abs(X));
  const ScalarField bump = ScalarField::sample(g, [c](Real x, Real y) {
    return (x - c) * std::exp(-std::pow(std::hypot(x - c, y - c), 2));
  });
  const VectorField2 Y(bump, ScalarField(g));
  r.radial = lp::besov_norm(diag::weak_directional_derivative(Y, theta), spec) / (max_abs(theta) * max_abs(Y));
  return r;
}

}  // namespace

TEST_CASE("tangent X kills the derivative of the disc indicator under refinement") {
  Real prev = 0.0;
  for (int n : {64, 128, 256}) {
    const auto r = tangency_residual(n);
    MESSAGE("n=", n, " tangent ", r.tangent, " radial ", r.radial);
    CHECK(r.radial >= 5 * r.tangent);
    if (prev > 0.0) CHECK(r.tangent < 0.8 * prev);
    prev = r.tangent;
  }
}

// Cell-center sampling leaves a staircase boundary whose weak tangential
// derivative decays slowly (about 0.026 of scale at n = 256, 0.020 at 512).
TEST_CASE("tangency residual is below 1e-2 of scale at n = 256" * doctest::should_fail()) {
  CHECK(tangency_residual(256).tangent <= 1e-2);
}

TEST_CASE("Z is a running supremum") {
  diag::ZTracker z;
  diag::StriatedNorms a, b;
  a.X_holder = 2.0;
  a.divXomega_m3 = 1.0;
  b.X_holder = 1.0;
  b.divXomega_m3 = 3.0;
  CHECK(z.add(a) == 3.0);
  CHECK(z.add(b) == 5.0);
  CHECK(z.add(diag::StriatedNorms{}) == 5.0);
}

TEST_CASE("record columns and formatting") {
  const GridPtr g = Grid::make(32);
  auto s = smooth_state(g, true);
  s.has_x = true;
  s.X = lagrangian::tangent_field(ScalarField::sample(g, [](Real x, Real y) { return std::sin(x) * std::sin(y); }));
  solver::StepperConfig cfg;
  diag::TimeIntegrals ti(s.nu);
  ti.add(diag::step_quantities(s, cfg, {}));
  diag::ZTracker z;
  const auto r = diag::make_record(s, ti, z, {});
  REQUIRE(r.values.size() == diag::record_columns().size());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    CHECK(r.values[i].first == diag::record_columns()[i]);
    CHECK(std::isfinite(r.values[i].second));
  }
  CHECK(r.get("energy_residual") == 0.0);
  CHECK(r.get("div_x_linf") <= 1e-12 * r.get("grad_x_linf"));
  std::ostringstream os;
  diag::write_record(os, r, "abc");
  CHECK(os.str().rfind("abc,0,0,0,", 0) == 0);
  for (Real v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(diag::format_real(v)) == v);
  CHECK_THROWS_AS(r.get("nope"), ArgumentError);
}

TEST_CASE("commutator probe: constant g is degenerate") {
  const GridPtr g = Grid::make(32);
  const auto sides = diag::commutator_sides(ScalarField::constant(g, 2.0), bqp::testing::random_band(g, 8, 1), 0.5);
  CHECK(sides.rhs == 0.0);
  CHECK(sides.lhs <= 1e-12);
  CHECK(sides.status == "degenerate: grad g = 0");
}

TEST_CASE("para-vector probe: constant X leaves only low-block terms") {
  const GridPtr g = Grid::make(64);
  const VectorField2 X(ScalarField::constant(g, 1.0), ScalarField::constant(g, -0.5));
  const ScalarField f = bqp::testing::random_band(g, 12, 4);
  const auto sides = diag::para_vector_sides(X, f, 0.5);
  // T_X f - d_X f = -sum_{j < 4} X . grad Delta_j f, which misses blocks beyond 4
  const ScalarField diff = lp::para_vector_field(X, f) - lp::directional_derivative(X, f);
  const auto bank = lp::filter_bank(g);
  Real high = 0.0;
  for (int j = 5; j <= bank->j_max(); ++j) high = std::max(high, max_abs(bank->block(diff, j)));
  CHECK(high <= 1e-12 * max_abs(diff));
  CHECK(high > 0.0);
  CHECK(std::isfinite(sides.ratio()));
  CHECK(sides.status == "ok");
}

TEST_CASE("probe ensembles are finite, deterministic and report growth") {
  diag::EnsembleConfig cfg;
  cfg.n = 32;
  cfg.size = 32;
  for (const auto& id : diag::probe_ids()) {
    const auto rep = diag::inequality_probe(id, cfg);
    CHECK(rep.all_finite);
    CHECK(rep.samples.size() == 32);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.growth > 0.0);
    CHECK(rep.p50 <= rep.p90);
    CHECK(rep.p90 <= rep.max_ratio);
    MESSAGE(id, ": max ", rep.max_ratio, " growth ", rep.growth);
  }
  const auto a = diag::inequality_probe("compat_vorticity", cfg);
  const auto b = diag::inequality_probe("compat_vorticity", cfg);
  std::ostringstream sa, sb;
  diag::write_probe_csv(sa, a, "h");
  diag::write_probe_csv(sb, b, "h");
  CHECK(sa.str() == sb.str());
  int lines = 0;
  for (char ch : sa.str()) lines += ch == '\n';
  CHECK(lines == 1 + 32 + 1);
  CHECK_THROWS_AS(diag::inequality_probe("nope", cfg), ArgumentError);
  cfg.size = 8;
  CHECK_THROWS_AS(diag::inequality_probe("commutator", cfg), ArgumentError);
}

TEST_CASE("transport-diffusion: pure heat matches the single-mode closed form") {
  const GridPtr g = Grid::make(32);
  const Real nu = 0.5, T = 0.2;
  const ScalarField f0 = ScalarField::sample(g, [](Real x, Real) { return std::cos(x); });
  std::vector<Real> times;
  for (int k = 0; k <= 2000; ++k) times.push_back(T * k / 2000);
  const auto traj = solver::solve_transport_diffusion(f0, nullptr, nullptr, nu, times, 1e-3);
  // cos x splits into chi(1) cos x and phi(1) cos x with phi(1) = s(3/7)
  const Real phi1 = oracle_step(3.0 / 7.0), chi1 = 1.0 - phi1;
  const Real norm_cos = std::numbers::pi * std::sqrt(2.0);
  for (Real s : {-0.5, 0.0, 0.5}) {
    // rho = 1, r = 1: nu * sum_j 2^{j(s+2)} a_j int e^{-nu t}
    const Real expected = (std::pow(2.0, -(s + 2.0)) * chi1 + phi1) * norm_cos * (1.0 - std::exp(-nu * T));
    CHECK(diag::smoothing_lhs(traj, times, {s, 2.0, 1.0}, 1.0, nu) == doctest::Approx(expected).epsilon(1e-8));
    const Real sup = (std::pow(2.0, -s) * chi1 + phi1) * norm_cos;
    CHECK(diag::smoothing_lhs(traj, times, {s, 2.0, 1.0}, lp::kInf, nu) == doctest::Approx(sup).epsilon(1e-12));
  }
}

TEST_CASE("transport-diffusion sweep") {
  diag::TransDiffSweep sw;
  sw.n = 32;
  sw.T = 0.2;
  sw.families = {"shear"};
  const auto rep = diag::trans_diff_bound_probe(sw);
  CHECK(rep.all_finite);
  CHECK(rep.rows.size() == 2 * 2 * (3 * 3 + 1));
  CHECK(rep.max_ratio > 0.0);
  MESSAGE("max ratio ", rep.max_ratio, " max growth ", rep.max_growth);
  sw.s_values = {1.0};
  CHECK_THROWS_AS(diag::trans_diff_bound_probe(sw), ArgumentError);
}

}
