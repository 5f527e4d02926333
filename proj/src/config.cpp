#include "bqp/config.hpp"

#include "bqp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace bqp::config {
namespace {

using Slot = std::variant<Real*, int*, bool*, std::string*, std::uint64_t*, std::vector<std::string>*,
                          std::vector<Real>*, ifrk::Scheme*, solver::ThetaAdvection*, solver::XAdvection*>;

struct Entry {
  const char* section;
  const char* key;
  Slot slot;
};

std::vector<Entry> entries(Config& c) {
  auto& sc = c.scenario;
  auto& st = c.stepper;
  auto& td = c.transdiff;
  return {
      {"grid", "n", &c.grid.n},
      {"grid", "L", &c.grid.length},
      {"physics", "nu", &c.physics.nu},
      {"physics", "M1", &c.physics.M1},
      {"physics", "M2", &c.physics.M2},
      {"physics", "striated", &c.physics.striated},
      {"physics", "eps", &c.physics.eps},
      {"physics", "q", &c.physics.q},
      {"scenario", "name", &sc.name},
      {"scenario", "center_x", &sc.center_x},
      {"scenario", "center_y", &sc.center_y},
      {"scenario", "radius", &sc.radius},
      {"scenario", "annulus_x", &sc.annulus_x},
      {"scenario", "annulus_y", &sc.annulus_y},
      {"scenario", "annulus_inner", &sc.annulus_inner},
      {"scenario", "annulus_outer", &sc.annulus_outer},
      {"scenario", "markers", &sc.markers},
      {"scenario", "levelset_width", &sc.levelset_width},
      {"stepper", "scheme", &st.scheme},
      {"stepper", "dt", &st.dt},
      {"stepper", "cfl", &st.cfl_target},
      {"stepper", "T", &c.T},
      {"stepper", "theta_advection", &st.theta_advection},
      {"stepper", "x_advection", &st.x_advection},
      {"stepper", "mollifier_cells", &st.mollifier_cells},
      {"stepper", "max_halvings", &st.max_halvings},
      {"output", "record_interval", &c.output.record_interval},
      {"output", "dir", &c.output.dir},
      {"output", "fields", &c.output.fields},
      {"output", "contours", &c.output.contours},
      {"seeds", "ensemble", &c.seeds.ensemble},
      {"seeds", "transdiff", &c.seeds.transdiff},
      {"probe", "n", &c.probe.n},
      {"probe", "ensemble_size", &c.probe.ensemble_size},
      {"probe", "band", &c.probe.band},
      {"transdiff", "n", &td.n},
      {"transdiff", "nu", &td.nu},
      {"transdiff", "T", &td.T},
      {"transdiff", "dt", &td.dt},
      {"transdiff", "output_dt", &td.output_dt},
      {"transdiff", "families", &td.families},
      {"transdiff", "s", &td.s_values},
      {"transdiff", "p", &td.p_values},
      {"transdiff", "r", &td.r_values},
      {"transdiff", "rho", &td.rho_values},
      {"transdiff", "band", &td.envelope.band},
      {"transdiff", "alpha", &td.envelope.alpha},
  };
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "cannot parse '" + text + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isnan(v)) throw ConfigError(key, "NaN is not a valid value");
  }
  return v;
}

template <class F>
auto parse_enum(const std::string& text, const std::string& key, F&& parse) {
  try {
    return parse(text);
  } catch (const ArgumentError& e) {
    throw ConfigError(key, e.what());
  }
}

void assign(const Slot& slot, const std::string& text, const std::string& key) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Real>) {
          *p = parse_number<Real>(text, key);
        } else if constexpr (std::is_same_v<T, int>) {
          *p = parse_number<int>(text, key);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          *p = parse_number<std::uint64_t>(text, key);
        } else if constexpr (std::is_same_v<T, bool>) {
          if (text == "true") *p = true;
          else if (text == "false") *p = false;
          else throw ConfigError(key, "expected true or false, got '" + text + "'");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (text.empty()) throw ConfigError(key, "empty value");
          *p = text;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          *p = split_list(text);
          for (const auto& item : *p)
            if (item.empty()) throw ConfigError(key, "empty list item");
        } else if constexpr (std::is_same_v<T, std::vector<Real>>) {
          p->clear();
          for (const auto& item : split_list(text)) p->push_back(parse_number<Real>(item, key));
        } else if constexpr (std::is_same_v<T, ifrk::Scheme>) {
          *p = parse_enum(text, key, ifrk::parse_scheme);
        } else if constexpr (std::is_same_v<T, solver::ThetaAdvection>) {
          *p = parse_enum(text, key, solver::parse_theta_advection);
        } else {
          *p = parse_enum(text, key, solver::parse_x_advection);
        }
      },
      slot);
}

std::string render(const Slot& slot) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Real>) {
          return diag::format_real(*p);
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          return std::to_string(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i) out += (i ? ", " : "") + (*p)[i];
          return out;
        } else if constexpr (std::is_same_v<T, std::vector<Real>>) {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i) out += (i ? ", " : "") + diag::format_real((*p)[i]);
          return out;
        } else if constexpr (std::is_same_v<T, ifrk::Scheme>) {
          return ifrk::scheme_name(*p);
        } else if constexpr (std::is_same_v<T, solver::ThetaAdvection>) {
          return solver::theta_advection_name(*p);
        } else {
          return solver::x_advection_name(*p);
        }
      },
      slot);
}

std::string serialize_impl(const Config& c, bool with_dir) {
  std::ostringstream os;
  std::string section;
  for (const Entry& e : entries(const_cast<Config&>(c))) {
    if (!with_dir && std::string(e.section) == "output" && std::string(e.key) == "dir") continue;
    if (section != e.section) {
      if (!section.empty()) os << '\n';
      section = e.section;
      os << '[' << section << "]\n";
    }
    os << e.key << " = " << render(e.slot) << '\n';
  }
  return os.str();
}

// Minimum-image distance between two points of the periodic box.
Real periodic_distance(Real ax, Real ay, Real bx, Real by, Real length) {
  auto wrap = [length](Real d) { return d - length * std::round(d / length); };
  return std::hypot(wrap(ax - bx), wrap(ay - by));
}

template <class F>
void rethrow_as_config(const std::string& key, F&& check) {
  try {
    check();
  } catch (const ArgumentError& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::map<std::string, Slot> slots;
  std::set<std::string> sections;
  for (const Entry& e : entries(c)) {
    slots.emplace(std::string(e.section) + "." + e.key, e.slot);
    sections.insert(e.section);
  }
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError(section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(line_no), "key outside any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
    assign(it->second, trim(line.substr(eq + 1)), key);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("file", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const { return serialize_impl(*this, true); }

std::string Config::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_impl(*this, false))));
  return buf;
}

diag::EnsembleConfig Config::ensemble() const {
  diag::EnsembleConfig e;
  e.n = probe.n;
  e.size = probe.ensemble_size;
  e.seed = seeds.ensemble;
  e.band = probe.band;
  e.params = striated();
  return e;
}

diag::TransDiffSweep Config::sweep() const {
  diag::TransDiffSweep s = transdiff;
  s.seed = seeds.transdiff;
  return s;
}

void Config::validate() const {
  GridPtr g;
  rethrow_as_config("grid.n", [&] { g = bqp::Grid::make(grid.n, grid.length); });
  const Real h = g->spacing();

  if (!(physics.nu > 0.0) || !std::isfinite(physics.nu)) throw ConfigError("physics.nu", "viscosity must be positive");
  if (!std::isfinite(physics.M1) || !std::isfinite(physics.M2)) throw ConfigError("physics.M1", "amplitudes must be finite");
  if (!(physics.eps > 0.0 && physics.eps < 1.0)) throw ConfigError("physics.eps", "need 0 < eps < 1");
  if (physics.striated) rethrow_as_config("physics.q", [&] { striated().validate(); });

  if (scenario.name != "disc") throw ConfigError("scenario.name", "unknown scenario '" + scenario.name + "' (expected disc)");
  const auto& sc = scenario;
  if (!(sc.radius > 0.0)) throw ConfigError("scenario.radius", "radius must be positive");
  if (!(sc.annulus_inner > 0.0 && sc.annulus_outer > sc.annulus_inner))
    throw ConfigError("scenario.annulus_inner", "need 0 < annulus_inner < annulus_outer");
  if (!(sc.annulus_outer < 0.5 * grid.length))
    throw ConfigError("scenario.annulus_outer", "annulus must fit inside one period (annulus_outer < L/2)");
  const auto safe = lagrangian::SafeRegion::central(grid.length);
  if (sc.center_x - sc.radius < safe.lo || sc.center_x + sc.radius > safe.hi || sc.center_y - sc.radius < safe.lo ||
      sc.center_y + sc.radius > safe.hi)
    throw ConfigError("scenario.radius", "disc must lie inside the central region [L/8, 7L/8]^2");
  const Real d = periodic_distance(sc.center_x, sc.center_y, sc.annulus_x, sc.annulus_y, grid.length);
  const Real gap = d + sc.radius <= sc.annulus_inner ? sc.annulus_inner - d - sc.radius : d - sc.radius - sc.annulus_outer;
  if (!(gap >= 4.0 * h))
    throw ConfigError("scenario.annulus_inner", "closures of D0 and D0* must be at least 4h apart (gap " +
                                                    diag::format_real(gap) + ", 4h = " + diag::format_real(4.0 * h) + ")");
  if (sc.markers < 64) throw ConfigError("scenario.markers", "need at least 64 markers");
  if (!(sc.levelset_width >= 2.0 * h)) throw ConfigError("scenario.levelset_width", "level-set band must span at least 2 cells");
  if (!(sc.levelset_width < sc.radius)) throw ConfigError("scenario.levelset_width", "level-set band must be narrower than the disc radius");

  rethrow_as_config("stepper", [&] { stepper.validate(); });
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("stepper.T", "final time must be finite and >= 0");

  if (!(output.record_interval > 0.0)) throw ConfigError("output.record_interval", "must be positive");
  if (output.fields.size() < 6 || output.fields.size() > kSnapshotFieldOrder.size() ||
      !std::equal(output.fields.begin(), output.fields.end(), kSnapshotFieldOrder.begin()))
    throw ConfigError("output.fields", "must list theta, omega, u1, u2, X1, X2 and optionally f, in that order");

  GridPtr pg;
  rethrow_as_config("probe.n", [&] { pg = bqp::Grid::make(probe.n); });
  rethrow_as_config("probe.ensemble_size", [&] {
    auto e = ensemble();
    // eps and q only matter to the striated probe, which checks them itself
    if (!physics.striated) e.params = {};
    e.validate();
  });
  if (probe.band > pg->dealias_cutoff()) throw ConfigError("probe.band", "band exceeds the dealias cutoff");

  rethrow_as_config("transdiff.n", [&] { bqp::Grid::make(transdiff.n); });
  rethrow_as_config("transdiff", [&] { sweep().validate(); });
  if (transdiff.envelope.band < 1 || transdiff.envelope.band > bqp::Grid::make(transdiff.n)->dealias_cutoff())
    throw ConfigError("transdiff.band", "band must lie in [1, dealias cutoff]");
}

}  // namespace bqp::config
