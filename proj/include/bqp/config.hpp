#pragma once

#include "bqp/diagnostics.hpp"
#include "bqp/snapshot.hpp"
#include "bqp/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

namespace bqp::config {

/// Run configuration, read from a plain-text file of `[section]` headers and
/// `key = value` lines. `#` starts a comment. Unknown sections or keys, repeated
/// keys and malformed values raise ConfigError naming `section.key`.
struct Config {
  struct Grid {
    int n = 256;
    Real length = 2.0 * std::numbers::pi;
  } grid;

  struct Physics {
    Real nu = 1.0;
    Real M1 = 1.0;
    Real M2 = 1.0;
    bool striated = true;
    Real eps = 0.5;
    Real q = 1.3;
  } physics;

  /// Disc D0 of the temperature patch and the annulus D0* carrying the
  /// compensating vorticity.
  struct Scenario {
    std::string name = "disc";
    Real center_x = std::numbers::pi;
    Real center_y = std::numbers::pi;
    Real radius = 1.0;
    Real annulus_x = std::numbers::pi;
    Real annulus_y = std::numbers::pi;
    Real annulus_inner = 1.5;
    Real annulus_outer = 2.5;
    int markers = 512;
    /// Width of the level-set band, in length units so that X0 does not sharpen
    /// under grid refinement.
    Real levelset_width = 0.4;
  } scenario;

  solver::StepperConfig stepper;
  Real T = 1.0;

  struct Output {
    Real record_interval = 0.05;
    std::string dir = "runs/disc";
    /// Prefix of kSnapshotFieldOrder; analyze needs at least the first six.
    std::vector<std::string> fields = kSnapshotFieldOrder;
    bool contours = true;
  } output;

  struct Seeds {
    std::uint64_t ensemble = 1;
    std::uint64_t transdiff = 7;
  } seeds;

  struct Probe {
    int n = 128;
    int ensemble_size = 64;
    int band = 0;
  } probe;

  diag::TransDiffSweep transdiff;

  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);
  /// Every key in canonical order; parse(serialize()) reproduces the config.
  std::string serialize() const;
  /// FNV-1a of the serialization with the output directory left out, as 16 hex digits.
  std::string hash() const;
  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  diag::StriatedParams striated() const { return {physics.eps, physics.q}; }
  diag::EnsembleConfig ensemble() const;
  diag::TransDiffSweep sweep() const;
};

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace bqp::config
