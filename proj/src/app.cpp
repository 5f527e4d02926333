#include "bqp/app.hpp"

#include "bqp/contour.hpp"
#include "bqp/diagnostics.hpp"
#include "bqp/scenario.hpp"
#include "bqp/snapshot.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef BQP_VERSION
#define BQP_VERSION "dev"
#endif

namespace bqp::app {
namespace {

using diag::format_real;

const char* kStepHeader = "t,kinetic,dissipation,work,grad_u_linf,grad_u_besov,omega_besov,theta_besov";

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string indexed(const std::string& stem, int k, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04d", k);
  return stem + buf + ext;
}

void write_step(std::ostream& os, const diag::StepQuantities& q) {
  os << format_real(q.energy.t) << ',' << format_real(q.energy.kinetic) << ',' << format_real(q.energy.dissipation)
     << ',' << format_real(q.energy.work) << ',' << format_real(q.grad_u_linf) << ',' << format_real(q.grad_u_besov)
     << ',' << format_real(q.omega_besov) << ',' << format_real(q.theta_besov) << '\n';
}

Real parse_real(const std::string& s) {
  Real v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataIntegrityError("bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<diag::StepQuantities> read_steps(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::string line;
  std::getline(in, line);
  if (line != kStepHeader) throw DataIntegrityError("unexpected step log header in " + p.string());
  std::vector<diag::StepQuantities> out;
  while (std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() != 8) throw DataIntegrityError("malformed step log row: " + line);
    diag::StepQuantities q;
    q.energy.t = parse_real(f[0]);
    q.energy.kinetic = parse_real(f[1]);
    q.energy.dissipation = parse_real(f[2]);
    q.energy.work = parse_real(f[3]);
    q.grad_u_linf = parse_real(f[4]);
    q.grad_u_besov = parse_real(f[5]);
    q.omega_besov = parse_real(f[6]);
    q.theta_besov = parse_real(f[7]);
    out.push_back(q);
  }
  return out;
}

Snapshot to_snapshot(const solver::SimState& s, std::size_t fields) {
  Snapshot snap;
  snap.n = s.grid()->n();
  snap.length = s.grid()->length();
  snap.t = s.t;
  const Values* all[] = {&s.theta.values, &s.omega.values, &s.u.x.values, &s.u.y.values,
                         &s.X.x.values,   &s.X.y.values,   &s.f.values};
  for (std::size_t k = 0; k < fields; ++k) snap.fields.push_back(*all[k]);
  return snap;
}

solver::SimState from_snapshot(const Snapshot& snap, Real nu) {
  if (snap.fields.size() < 6) throw DataIntegrityError("snapshot lacks theta, omega, u or X");
  const GridPtr g = Grid::make(snap.n, snap.length);
  solver::SimState s;
  s.t = snap.t;
  s.nu = nu;
  s.theta = ScalarField(g, snap.fields[0]);
  s.omega = ScalarField(g, snap.fields[1]);
  s.u = VectorField2(ScalarField(g, snap.fields[2]), ScalarField(g, snap.fields[3]));
  s.has_x = true;
  s.X = VectorField2(ScalarField(g, snap.fields[4]), ScalarField(g, snap.fields[5]));
  if (snap.fields.size() > 6) {
    s.has_levelset = true;
    s.f = ScalarField(g, snap.fields[6]);
  }
  return s;
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir / "snapshots")) return out;
  for (const auto& e : fs::directory_iterator(dir / "snapshots"))
    if (e.path().extension() == ".bqp") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

void write_manifest(const fs::path& p, const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(p);
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

}  // namespace

std::string version() { return BQP_VERSION; }

RunSummary run(const config::Config& cfg, const fs::path& dir, std::ostream& log) {
  cfg.validate();
  scenario::Scenario sc = scenario::build_scenario(cfg);
  const std::string hash = cfg.hash();
  const diag::StriatedParams params = cfg.striated();
  const Real eps = cfg.physics.eps;

  fs::create_directories(dir / "snapshots");
  if (cfg.output.contours) fs::create_directories(dir / "contours");
  open_out(dir / "config.cfg") << cfg.serialize();

  auto diagnostics = open_out(dir / "diagnostics.csv");
  auto steps = open_out(dir / "steps.csv");
  auto geometry = open_out(dir / "geometry.csv");
  auto markers = open_out(dir / "markers.csv");
  diag::write_record_header(diagnostics);
  steps << kStepHeader << '\n';
  diag::write_geometry_header(geometry);
  markers << "t,i,x,y,tangent_x,tangent_y\n";

  diag::TimeIntegrals integrals(sc.state.nu);
  diag::ZTracker z;
  lagrangian::PatchState& patch = sc.patch;
  const Real area0 = sc.disc_area_markers;
  const auto safe = lagrangian::SafeRegion::central(cfg.grid.length);

  RunSummary summary;
  summary.dir = dir;
  int max_halvings = 0;
  Real max_speed = 0.0;
  interp::VelocitySampler sampler = interp::VelocitySampler::from_vorticity(sc.state.omega);

  solver::RunHooks hooks;
  hooks.on_step = [&](const solver::SimState& before, const solver::SimState& after, const solver::StepInfo& info) {
    ++summary.steps;
    max_halvings = std::max(max_halvings, info.halvings);
    max_speed = std::max(max_speed, info.max_speed);
    const auto q = diag::step_quantities(after, cfg.stepper, params);
    write_step(steps, q);
    integrals.add(q);
    interp::VelocitySampler next = interp::VelocitySampler::from_vorticity(after.omega);
    lagrangian::advect_markers(patch, lagrangian::Flow::from(sampler), lagrangian::Flow::from(next),
                               after.t - before.t, safe);
    sampler = std::move(next);
    if (patch.spacing_ratio() > 3.0) {
      const interp::HermiteField x1(after.X.x), x2(after.X.y);
      lagrangian::redistribute(patch, [&](const interp::Vec2& p) {
        return interp::Vec2(x1.value(p.x(), p.y()), x2.value(p.x(), p.y()));
      });
      log << "redistributed markers at t = " << format_real(after.t) << '\n';
    }
  };
  hooks.on_record = [&](const solver::SimState& s) {
    if (integrals.empty()) {
      const auto q = diag::step_quantities(s, cfg.stepper, params);
      write_step(steps, q);
      integrals.add(q);
    }
    const fs::path snap = dir / "snapshots" / indexed("snap", summary.records, ".bqp");
    write_snapshot(snap, to_snapshot(s, cfg.output.fields.size()));
    summary.last_snapshot = snap;

    const auto record = diag::make_record(s, integrals, z, params);
    diag::write_record(diagnostics, record, hash);
    diag::write_geometry(geometry, diag::geometry_record(s, patch, area0, sc.level_band, eps), hash);
    const auto tangents = patch.tangents();
    for (std::size_t i = 0; i < patch.size(); ++i) {
      markers << format_real(s.t) << ',' << i << ',' << format_real(patch.markers[i].x()) << ','
              << format_real(patch.markers[i].y()) << ',' << format_real(tangents[i].x()) << ','
              << format_real(tangents[i].y()) << '\n';
    }
    if (cfg.output.contours) {
      auto out = open_out(dir / "contours" / indexed("contour", summary.records, ".csv"));
      out << "t,piece,closed,x,y\n";
      const Values mask = lagrangian::LevelSet{s.f, sc.level_band}.band_mask();
      const auto pieces = contour::zero_contour(s.f, &mask);
      for (std::size_t k = 0; k < pieces.size(); ++k)
        for (const auto& p : pieces[k].points)
          out << format_real(s.t) << ',' << k << ',' << (pieces[k].closed ? 1 : 0) << ',' << format_real(p.x()) << ','
              << format_real(p.y()) << '\n';
    }
    ++summary.records;
    log << "t = " << format_real(s.t) << "  energy_residual_rel = " << format_real(record.get("energy_residual_rel"))
        << "  Z = " << format_real(record.get("Z")) << '\n';
    for (auto* f : {&diagnostics, &steps, &geometry, &markers}) f->flush();
  };

  solver::RunControl control;
  control.T = cfg.T;
  control.record_interval = cfg.output.record_interval;
  control.stepper = cfg.stepper;

  std::vector<std::pair<std::string, std::string>> manifest{
      {"config_hash", hash},
      {"version", version()},
      {"fftw", fftw_version},
      {"eigen", eigen_version()},
      {"scenario", cfg.scenario.name},
      {"grid_n", std::to_string(cfg.grid.n)},
      {"L", format_real(cfg.grid.length)},
      {"nu", format_real(cfg.physics.nu)},
      {"scheme", ifrk::scheme_name(cfg.stepper.scheme)},
      {"theta_advection", solver::theta_advection_name(cfg.stepper.theta_advection)},
      {"x_advection", solver::x_advection_name(cfg.stepper.x_advection)},
      {"dt_max", format_real(cfg.stepper.dt)},
      {"cfl", format_real(cfg.stepper.cfl_target)},
      {"T", format_real(cfg.T)},
      {"record_interval", format_real(cfg.output.record_interval)},
      {"integral_cadence", "every step"},
      {"snapshot_fields", std::to_string(cfg.output.fields.size())},
      {"markers", std::to_string(cfg.scenario.markers)},
      {"disc_area_exact", format_real(std::numbers::pi * cfg.scenario.radius * cfg.scenario.radius)},
      {"disc_area_grid", format_real(sc.disc_area_grid)},
      {"disc_area_markers", format_real(sc.disc_area_markers)},
      {"ring_quadrature_error", format_real(sc.ring_quadrature_error)},
  };
  auto finish = [&](const std::string& status) {
    auto m = manifest;
    m.emplace_back("status", status);
    m.emplace_back("steps", std::to_string(summary.steps));
    m.emplace_back("records", std::to_string(summary.records));
    m.emplace_back("max_halvings", std::to_string(max_halvings));
    m.emplace_back("max_speed", format_real(max_speed));
    m.emplace_back("redistributions", std::to_string(patch.redistributions));
    m.emplace_back("last_snapshot", summary.last_snapshot.filename().string());
    write_manifest(dir / "manifest.txt", m);
  };

  try {
    solver::run(sc.state, control, hooks);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    finish(std::string("failed: ") + e.what());
    throw RuntimeFailure(e.what(), summary.last_snapshot);
  }
  finish("completed");
  return summary;
}

std::string analyze(const fs::path& dir) {
  const config::Config cfg = config::Config::load(dir / "config.cfg");
  const std::string hash = cfg.hash();
  const diag::StriatedParams params = cfg.striated();
  const auto steps = read_steps(dir / "steps.csv");

  std::ostringstream out;
  diag::write_record_header(out);
  diag::TimeIntegrals integrals(cfg.physics.nu);
  diag::ZTracker z;
  std::size_t next = 0;
  for (const fs::path& p : snapshot_files(dir)) {
    const solver::SimState s = from_snapshot(read_snapshot(p), cfg.physics.nu);
    while (next < steps.size() && steps[next].energy.t <= s.t) integrals.add(steps[next++]);
    diag::write_record(out, diag::make_record(s, integrals, z, params), hash);
  }
  return out.str();
}

fs::path probe(const config::Config& cfg, const std::string& id, const fs::path& dir, int threads, std::ostream& log) {
  cfg.validate();
  fs::create_directories(dir);
  const std::string hash = cfg.hash();
  if (id == "transdiff") {
    const auto rep = diag::trans_diff_bound_probe(cfg.sweep());
    const fs::path p = dir / "transdiff.csv";
    auto out = open_out(p);
    diag::write_transdiff_csv(out, rep, hash);
    log << "transdiff: rows " << rep.rows.size() << "  max ratio " << format_real(rep.max_ratio) << "  max growth "
        << format_real(rep.max_growth) << (rep.all_finite ? "" : "  NON-FINITE") << '\n';
    return p;
  }
  auto ens = cfg.ensemble();
  ens.threads = threads;
  if (id == "striated_velocity") {
    try {
      ens.params.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError("physics.q", e.what());
    }
  }
  const auto rep = diag::inequality_probe(id, ens);
  const fs::path p = dir / ("probe_" + id + ".csv");
  auto out = open_out(p);
  diag::write_probe_csv(out, rep, hash);
  log << id << ": max ratio " << format_real(rep.max_ratio) << "  at 2n " << format_real(rep.max_ratio_refined)
      << "  growth " << format_real(rep.growth) << (rep.all_finite ? "" : "  NON-FINITE") << '\n';
  return p;
}

int render(const fs::path& dir) {
  // Marker curves keyed by the record time as written.
  std::map<std::string, std::vector<std::pair<Real, Real>>> curves;
  {
    std::istringstream in(read_text(dir / "markers.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto f = split(line);
      if (f.size() != 6) throw DataIntegrityError("malformed markers row: " + line);
      curves[f[0]].emplace_back(parse_real(f[2]), parse_real(f[3]));
    }
  }
  fs::create_directories(dir / "images");
  const auto files = snapshot_files(dir);
  if (files.empty()) throw DataIntegrityError("no snapshots in " + dir.string());
  const Snapshot first = read_snapshot(files.front());
  // Fixed map per field: the value range of the first snapshot.
  std::array<std::pair<Real, Real>, 2> range;
  for (int k = 0; k < 2; ++k) {
    range[k] = {first.fields[k].minCoeff(), first.fields[k].maxCoeff()};
    if (range[k].second <= range[k].first) range[k].second = range[k].first + 1.0;
  }
  const char* names[] = {"theta", "omega"};
  int written = 0;
  for (std::size_t idx = 0; idx < files.size(); ++idx) {
    const Snapshot snap = read_snapshot(files[idx]);
    const int n = snap.n;
    const Real h = snap.length / n;
    for (int k = 0; k < 2; ++k) {
      std::vector<unsigned char> px(static_cast<std::size_t>(n) * n);
      const auto [lo, hi] = range[k];
      // Row 0 of the image is the top, i.e. the largest y.
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const Real v = std::clamp((snap.fields[k](iy, ix) - lo) / (hi - lo), 0.0, 1.0);
          px[static_cast<std::size_t>(n - 1 - iy) * n + ix] = static_cast<unsigned char>(std::lround(255.0 * v));
        }
      const auto it = curves.find(format_real(snap.t));
      if (it != curves.end()) {
        const std::vector<unsigned char> base = px;
        const auto& c = it->second;
        for (std::size_t i = 0; i < c.size(); ++i) {
          const auto [x0, y0] = c[i];
          const auto [x1, y1] = c[(i + 1) % c.size()];
          const int m = 1 + static_cast<int>(std::ceil(std::hypot(x1 - x0, y1 - y0) / (0.5 * h)));
          for (int s = 0; s <= m; ++s) {
            const Real x = x0 + (x1 - x0) * s / m, y = y0 + (y1 - y0) * s / m;
            const long ix = ((std::lround(x / h) % n) + n) % n, iy = ((std::lround(y / h) % n) + n) % n;
            const auto at = static_cast<std::size_t>(n - 1 - iy) * n + static_cast<std::size_t>(ix);
            px[at] = base[at] >= 128 ? 0 : 255;
          }
        }
      }
      const std::string stem = indexed(names[k], static_cast<int>(idx), "");
      std::ofstream img(dir / "images" / (stem + ".pgm"), std::ios::binary | std::ios::trunc);
      img << "P5\n" << n << ' ' << n << "\n255\n";
      img.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
      open_out(dir / "images" / (stem + ".txt"))
          << "field=" << names[k] << "\nt=" << format_real(snap.t) << "\nmin=" << format_real(lo)
          << "\nmax=" << format_real(hi) << "\nmap=linear [min,max] -> [0,255], clamped\n";
      ++written;
    }
  }
  return written;
}

}  // namespace bqp::app
