#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "obstacle_mcf/solver.hpp"

namespace obstacle_mcf {

/// A persisted state plus the run accumulators at that step.
struct Snapshot {
  PhaseState state;
  std::int64_t step = 0;
  double dissipation_accum = 0.0;
  double lambda_mass = 0.0;
};

/// Name of the snapshot directory for a step: snap_000042.
std::string snapshot_name(std::int64_t step);

/// Writes <dir>/meta.json and <dir>/field.f64 (raw little-endian doubles,
/// row-major). Returns the two file paths.
std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& dir, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& dir);

/// Snapshot directories below `run_dir`, ordered by step.
std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& run_dir);

}  // namespace obstacle_mcf
