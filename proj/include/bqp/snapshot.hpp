#pragma once

#include "bqp/field.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bqp {

/// BQP1 binary snapshot.
///
/// Layout (all little-endian):
///   4 bytes  magic "BQP1"
///   u32      n
///   f64      L
///   f64      t
///   then, for each stored field in declared order, n*n f64 values in
///   row-major (iy, ix) order.
///
/// The field count is implied by the file size. Solver snapshots store the
/// fields named in kSnapshotFieldOrder.
struct Snapshot {
  int n = 0;
  Real length = 0.0;
  Real t = 0.0;
  std::vector<Values> fields;
};

inline const std::vector<std::string> kSnapshotFieldOrder = {"theta", "omega", "u1", "u2", "X1", "X2", "f"};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace bqp
