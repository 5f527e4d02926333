#include "bqp/app.hpp"
#include "bqp/config.hpp"
#include "bqp/error.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

int config_error(const std::string& key, const std::string& message) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n') c = ' ';
  std::cerr << "error: config key=" << key << " message=" << flat << '\n';
  return kConfigExit;
}

// BQP_THREADS caps the worker count of ensemble probes.
int worker_cap() {
  const char* env = std::getenv("BQP_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw bqp::ConfigError("BQP_THREADS", "expected an integer in [1, 1024]");
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boussinesq temperature-patch simulator and estimate probes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bqp::app::version());

  std::string config_path, out_dir, lemma;
  int ensemble_size = 0;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "run a scenario and write its records");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--out", out_dir, "run directory (default: output.dir of the config)");

  auto* analyze = app.add_subcommand("analyze", "recompute diagnostics.csv of a finished run");
  analyze->add_option("--out", out_dir, "run directory")->required();

  auto* probe = app.add_subcommand("probe", "evaluate an inequality probe or the transport-diffusion sweep");
  probe->add_option("--config", config_path, "configuration file")->required();
  probe->add_option("--lemma", lemma,
                    "commutator, para_vector, transport_commutator, striated_velocity, compat_vorticity, "
                    "compat_temperature, transdiff or all")
      ->required();
  probe->add_option("--out", out_dir, "report directory (default: output.dir of the config)");
  probe->add_option("--ensemble-size", ensemble_size, "samples per ensemble");
  probe->add_option("--seed", seed, "ensemble seed");

  auto* render = app.add_subcommand("render", "write PGM images of theta and omega per snapshot");
  render->add_option("--out", out_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_error("cli", e.what());
  }

  fs::path last_snapshot;
  try {
    if (*run) {
      const auto cfg = bqp::config::Config::load(config_path);
      cfg.validate();
      const fs::path dir = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
      const auto summary = bqp::app::run(cfg, dir, std::cout);
      std::cout << "completed: " << summary.steps << " steps, " << summary.records << " records in " << dir.string()
                << '\n';
      return 0;
    }
    if (*analyze) {
      const fs::path dir(out_dir);
      const std::string text = bqp::app::analyze(dir);
      std::ofstream(dir / "diagnostics.analyzed.csv", std::ios::trunc) << text;
      std::ifstream stored_in(dir / "diagnostics.csv");
      std::ostringstream stored;
      stored << stored_in.rdbuf();
      if (stored.str() == text) {
        std::cout << "identical: diagnostics.analyzed.csv matches diagnostics.csv\n";
        return 0;
      }
      std::cerr << "error: runtime message=recomputed diagnostics differ from diagnostics.csv\n";
      return kRuntimeExit;
    }
    if (*probe) {
      auto cfg = bqp::config::Config::load(config_path);
      if (ensemble_size > 0) cfg.probe.ensemble_size = ensemble_size;
      if (seed >= 0) cfg.seeds.ensemble = static_cast<std::uint64_t>(seed);
      cfg.validate();
      const int threads = worker_cap();
      const fs::path dir = out_dir.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir);
      std::vector<std::string> ids;
      if (lemma == "all") {
        ids = bqp::diag::probe_ids();
        ids.push_back("transdiff");
      } else {
        ids = {lemma};
      }
      for (const auto& id : ids) {
        if (id != "transdiff" && std::find(bqp::diag::probe_ids().begin(), bqp::diag::probe_ids().end(), id) ==
                                     bqp::diag::probe_ids().end())
          return config_error("lemma", "unknown probe '" + id + "'");
        std::cout << "wrote " << bqp::app::probe(cfg, id, dir, threads, std::cout).string() << '\n';
      }
      return 0;
    }
    if (*render) {
      std::cout << "wrote " << bqp::app::render(fs::path(out_dir)) << " images\n";
      return 0;
    }
  } catch (const bqp::ConfigError& e) {
    std::string msg = e.what();
    const std::string prefix = e.key + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    return config_error(e.key, msg);
  } catch (const bqp::app::RuntimeFailure& e) {
    std::cerr << "error: runtime message=" << e.what() << " last_snapshot=" << e.last_snapshot.string() << '\n';
    return kRuntimeExit;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime message=" << e.what() << " last_snapshot=" << last_snapshot.string() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
