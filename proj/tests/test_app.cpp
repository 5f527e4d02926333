#include "doctest.h"
#include "support.hpp"

#include "bqp/app.hpp"
#include "bqp/config.hpp"
#include "bqp/scenario.hpp"
#include "bqp/snapshot.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace bqp;
using config::Config;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bqp_test_" + name);
  fs::remove_all(p);
  return p;
}

Config small_config() {
  Config c;
  c.grid.n = 64;
  c.stepper.dt = 0.008;
  c.T = 0.1;
  c.scenario.markers = 128;
  c.probe.n = 32;
  c.probe.ensemble_size = 32;
  return c;
}

std::string config_error_key(const std::string& text) {
  try {
    Config::parse(text).validate();
  } catch (const ConfigError& e) {
    return e.key;
  }
  return "";
}

int count_lines(const std::string& s) {
  int k = 0;
  for (char c : s) k += c == '\n';
  return k;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(BQP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults are valid and round-trip") {
  const Config c;
  CHECK_NOTHROW(c.validate());
  const Config d = Config::parse(c.serialize());
  CHECK(d.serialize() == c.serialize());
  CHECK(d.hash() == c.hash());
}

TEST_CASE("round-trip keeps every edited value") {
  Config c;
  c.grid.n = 128;
  c.physics.nu = 0.1 + 0.2;  // not a short decimal
  c.physics.striated = false;
  c.stepper.scheme = ifrk::Scheme::ifrk3;
  c.stepper.theta_advection = solver::ThetaAdvection::spectral;
  c.stepper.x_advection = solver::XAdvection::semi_lagrangian;
  c.output.fields = {"theta", "omega", "u1", "u2", "X1", "X2"};
  c.transdiff.rho_values = {1.0, lp::kInf};
  c.transdiff.families = {"mixer"};
  c.seeds.ensemble = 18446744073709551615ULL;
  const Config d = Config::parse(c.serialize());
  CHECK(d.serialize() == c.serialize());
  CHECK(d.physics.nu == c.physics.nu);
  CHECK(d.stepper.scheme == ifrk::Scheme::ifrk3);
  CHECK(d.stepper.theta_advection == solver::ThetaAdvection::spectral);
  CHECK(d.stepper.x_advection == solver::XAdvection::semi_lagrangian);
  CHECK(std::isinf(d.transdiff.rho_values[1]));
  CHECK(d.output.fields.size() == 6);
  CHECK(d.seeds.ensemble == c.seeds.ensemble);
  CHECK_FALSE(d.physics.striated);
}

TEST_CASE("comments, blank lines and partial files") {
  const Config c = Config::parse("# header\n\n[physics]\n  nu = 0.25   # viscosity\n\n[grid]\nn=64\n");
  CHECK(c.physics.nu == 0.25);
  CHECK(c.grid.n == 64);
  CHECK(c.physics.M1 == 1.0);
}

TEST_CASE("fail-closed parsing") {
  CHECK(config_error_key("[physics]\nviscosity = 1\n") == "physics.viscosity");
  CHECK(config_error_key("[physic]\nnu = 1\n") == "physic");
  CHECK(config_error_key("[physics]\nnu = 1\nnu = 2\n") == "physics.nu");
  CHECK(config_error_key("[physics]\nnu = 1e\n") == "physics.nu");
  CHECK(config_error_key("[physics]\nnu = nan\n") == "physics.nu");
  CHECK(config_error_key("[physics]\nstriated = yes\n") == "physics.striated");
  CHECK(config_error_key("nu = 1\n") == "line 1");
  CHECK(config_error_key("[physics]\nnu\n") == "line 2");
  CHECK(config_error_key("[stepper]\nscheme = rk4\n") == "stepper.scheme");
  CHECK(config_error_key("[output]\nfields = theta, omega\n") == "output.fields");
}

TEST_CASE("condition eps/2 + 1/q > 1 is enforced") {
  try {
    Config::parse("[physics]\neps = 0.5\nq = 1.4\n").validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "physics.q");
    CHECK(std::string(e.what()).find("eps/2 + 1/q > 1") != std::string::npos);
  }
  CHECK_NOTHROW(Config::parse("[physics]\nstriated = false\neps = 0.5\nq = 1.4\n").validate());
}

TEST_CASE("disc and annulus closures must be 4h apart") {
  Config c;
  const Real h = c.grid.length / c.grid.n;
  c.scenario.annulus_inner = c.scenario.radius + 3.9 * h;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.scenario.annulus_inner = c.scenario.radius + 4.1 * h;
  CHECK_NOTHROW(c.validate());
  // annulus away from the disc
  c.scenario.annulus_inner = 0.3;
  c.scenario.annulus_outer = 0.6;
  c.scenario.annulus_x = 0.0;
  c.scenario.annulus_y = 0.0;
  CHECK_NOTHROW(c.validate());
  // reaches past half a period
  c.scenario.annulus_outer = std::hypot(std::numbers::pi, std::numbers::pi) - 1.0;
  try {
    c.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.key == "scenario.annulus_outer");
  }
}

TEST_CASE("hash ignores the output directory only") {
  Config a, b;
  b.output.dir = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.physics.nu = 0.5;
  CHECK(a.hash() != b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(config::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(config::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

}

TEST_SUITE("scenario") {

TEST_CASE("ring integral") {
  for (Real mid : {2.0, 0.3}) {
    const Real half = 0.5 * std::min(mid, 1.0);
    // composite Simpson in r over the support
    const int m = 20000;
    const Real a = mid - half, step = 2.0 * half / m;
    Real sum = 0.0;
    for (int i = 0; i <= m; ++i) {
      const Real r = a + i * step;
      const Real w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * 2.0 * std::numbers::pi * r * scenario::ring_profile(r, mid, half);
    }
    CHECK(scenario::ring_integral(mid, half) == doctest::Approx(sum * step / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("disc data at n = 256") {
  const Config c;
  const auto sc = scenario::build_scenario(c);
  const auto& s = sc.state;
  // theta0 is exactly {0, M1}
  CHECK(((s.theta.values == 0.0) || (s.theta.values == c.physics.M1)).all());
  CHECK(max_abs(s.theta) == c.physics.M1);
  // int omega0 = M2 |D0|_grid (1 - quadrature / closed form) before the mean is pinned
  CHECK(c.physics.M2 * sc.disc_area_grid * sc.ring_quadrature_error <= 1e-10);
  CHECK(std::abs(sc.disc_area_markers - std::numbers::pi) <= 1e-6 * std::numbers::pi);
  MESSAGE("grid area ", sc.disc_area_grid, " vs pi");
  // X0 is divergence-free and tangent to the circle at the markers
  CHECK(max_abs(divergence(s.X)) <= 1e-12 * max_abs(s.X));
  Real worst = 0.0;
  const interp::HermiteField x1(s.X.x), x2(s.X.y);
  for (const auto& m : sc.patch.markers) {
    const interp::Vec2 n = (m - interp::Vec2(c.scenario.center_x, c.scenario.center_y)).normalized();
    const interp::Vec2 x(x1.value(m.x(), m.y()), x2.value(m.x(), m.y()));
    worst = std::max(worst, std::abs(x.dot(n)) / x.norm());
  }
  CHECK(worst <= 1e-3);
  CHECK(sc.patch.x0.size() == sc.patch.size());
}

TEST_CASE("vorticity sits on the disc and the annulus only") {
  Config c;
  c.grid.n = 128;
  const auto sc = scenario::build_scenario(c);
  const GridPtr g = sc.state.grid();
  const Real h = g->spacing();
  Real gap_max = 0.0;
  for (int iy = 0; iy < g->n(); ++iy)
    for (int ix = 0; ix < g->n(); ++ix) {
      const Real r = std::hypot(g->x(ix) - std::numbers::pi, g->y(iy) - std::numbers::pi);
      if (r > 1.0 + 8 * h && r < 1.5 - 2 * h) gap_max = std::max(gap_max, std::abs(sc.state.omega(iy, ix)));
    }
  // only the dealias ripple of the indicator leaks into the gap
  CHECK(gap_max <= 0.15);
}

TEST_CASE("zero amplitudes give zero data") {
  Config c = small_config();
  c.physics.M1 = 0.0;
  c.physics.M2 = 0.0;
  const auto sc = scenario::build_scenario(c);
  CHECK(max_abs(sc.state.theta) == 0.0);
  CHECK(max_abs(sc.state.omega) == 0.0);
  CHECK(max_abs(sc.state.u) == 0.0);
  CHECK(max_abs(sc.state.X) > 0.0);
}

}

TEST_SUITE("app") {

TEST_CASE("run writes the record set and analyze reproduces it") {
  const Config c = small_config();
  const fs::path dir = fresh_dir("run");
  std::ostringstream log;
  const auto summary = app::run(c, dir, log);
  CHECK(summary.records == 3);
  for (const char* f : {"config.cfg", "manifest.txt", "diagnostics.csv", "steps.csv", "geometry.csv", "markers.csv"})
    CHECK(fs::exists(dir / f));
  CHECK(fs::exists(dir / "snapshots" / "snap_0002.bqp"));
  CHECK(fs::exists(dir / "contours" / "contour_0002.csv"));
  CHECK(count_lines(slurp(dir / "diagnostics.csv")) == 4);
  CHECK(count_lines(slurp(dir / "markers.csv")) == 1 + 3 * 128);
  CHECK(slurp(dir / "manifest.txt").find("status=completed") != std::string::npos);
  const Snapshot snap = read_snapshot(dir / "snapshots" / "snap_0002.bqp");
  CHECK(snap.fields.size() == 7);
  CHECK(snap.t == doctest::Approx(0.1));

  CHECK(app::analyze(dir) == slurp(dir / "diagnostics.csv"));

  const fs::path again = fresh_dir("run_again");
  app::run(c, again, log);
  for (const char* f : {"diagnostics.csv", "steps.csv", "geometry.csv", "markers.csv", "manifest.txt"})
    CHECK(slurp(dir / f) == slurp(again / f));
  CHECK(slurp(dir / "snapshots" / "snap_0002.bqp") == slurp(again / "snapshots" / "snap_0002.bqp"));

  CHECK(app::render(dir) == 6);
  const std::string pgm = slurp(dir / "images" / "theta_0002.pgm");
  CHECK(pgm.rfind("P5\n64 64\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n64 64\n255\n").size() + 64 * 64);
  CHECK(slurp(dir / "images" / "theta_0002.txt").find("min=0\nmax=1\n") != std::string::npos);
}

TEST_CASE("probe report has one row per sample plus a summary") {
  const fs::path dir = fresh_dir("probe");
  std::ostringstream log;
  const auto path = app::probe(small_config(), "compat_temperature", dir, 2, log);
  const std::string text = slurp(path);
  CHECK(count_lines(text) == 1 + 32 + 1);
  const auto one = app::probe(small_config(), "compat_temperature", fresh_dir("probe1"), 1, log);
  CHECK(slurp(one) == text);
}

TEST_CASE("runtime failures keep the last snapshot") {
  Config c = small_config();
  c.physics.M1 = 1e308;
  const fs::path dir = fresh_dir("fail");
  std::ostringstream log;
  try {
    app::run(c, dir, log);
    FAIL("expected a runtime failure");
  } catch (const app::RuntimeFailure& e) {
    CHECK(e.last_snapshot.filename() == "snap_0000.bqp");
    CHECK(fs::exists(e.last_snapshot));
  }
  CHECK(slurp(dir / "manifest.txt").find("status=failed") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = fresh_dir("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "[physics]\nq = 1.9\n";
  std::ofstream(dir / "unknown.cfg") << "[physics]\nmass = 1\n";
  Config c = small_config();
  c.T = 0.02;
  std::ofstream(dir / "ok.cfg") << c.serialize();
  c.physics.M1 = 1e308;
  std::ofstream(dir / "blowup.cfg") << c.serialize();
  CHECK(run_cli("run --config " + (dir / "bad.cfg").string()) == 1);
  CHECK(run_cli("run --config " + (dir / "unknown.cfg").string()) == 1);
  CHECK(run_cli("run --config " + (dir / "missing.cfg").string()) == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("run --config " + (dir / "blowup.cfg").string() + " --out " + (dir / "b").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "r").string()) == 0);
  CHECK(run_cli("analyze --out " + (dir / "r").string()) == 0);
  CHECK(run_cli("render --out " + (dir / "r").string()) == 0);
  CHECK(run_cli("probe --config " + (dir / "ok.cfg").string() + " --lemma nope --out " + (dir / "p").string()) == 1);
}

}
