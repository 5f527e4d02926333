#pragma once

#include "bqp/config.hpp"
#include "bqp/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace bqp::app {

namespace fs = std::filesystem;

/// A run that stopped early; `last_snapshot` is the newest snapshot on disk (may be empty).
class RuntimeFailure : public Error {
 public:
  RuntimeFailure(const std::string& what, fs::path last_snapshot)
      : Error(what), last_snapshot(std::move(last_snapshot)) {}
  fs::path last_snapshot;
};

struct RunSummary {
  fs::path dir;
  long steps = 0;
  int records = 0;
  fs::path last_snapshot;
};

/// Runs the configured scenario and writes into `dir`:
///   config.cfg       the serialized configuration
///   manifest.txt     key=value summary (hash, grid, scheme, versions, outcome)
///   diagnostics.csv  one row per record time
///   steps.csv        step-cadence inputs of the time integrals (round-trip decimals)
///   geometry.csv     marker-based patch geometry per record time
///   markers.csv      t,i,x,y,tangent_x,tangent_y per record time
///   contours/        zero contour of the level set per record time
///   snapshots/       BQP1 snapshots per record time
/// Throws RuntimeFailure on solver or marker failures, ConfigError on bad configs.
RunSummary run(const config::Config& cfg, const fs::path& dir, std::ostream& log);

/// Recomputes diagnostics.csv of a finished run from its snapshots and step log.
std::string analyze(const fs::path& dir);

/// Writes probe_<id>.csv (or transdiff.csv for id "transdiff") into `dir` and
/// returns its path. `threads` workers evaluate ensemble samples.
fs::path probe(const config::Config& cfg, const std::string& id, const fs::path& dir, int threads, std::ostream& log);

/// Writes images/<field>_<k>.pgm with a .txt sidecar holding the value map, for
/// theta and omega of every snapshot, with the marker curve drawn on top.
int render(const fs::path& dir);

/// Library version string.
std::string version();

}  // namespace bqp::app
