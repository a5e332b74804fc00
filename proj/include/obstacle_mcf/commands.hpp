#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obstacle_mcf/measures.hpp"
#include "obstacle_mcf/solver.hpp"

namespace obstacle_mcf {

struct ManifestFile {
  std::string path;  ///< relative to the output directory
  std::uintmax_t size = 0;
  std::uint32_t crc32 = 0;
};

struct RunManifest {
  std::string config_text;
  std::string output_dir;
  std::vector<ManifestFile> files;
  double wall_seconds = 0.0;
};

/// "t,total_energy,...,lambda_mass" plus one row per record, %.17g.
std::string diagnostics_csv(std::span<const DiagnosticsRecord> records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// Runs the configuration and writes config.txt, diagnostics.csv, the
/// snapshot directories and manifest.json below config.output_dir.
RunManifest cmd_run(const SolverConfig& config);

/// True when every listed file exists with the recorded size and checksum.
bool verify_manifest(const RunManifest& manifest);

/// The base configuration rescaled to another epsilon: h scales with
/// epsilon, delta = epsilon^2 for the yosida scheme, an explicit dt keeps
/// its ratio to the stability limit and output goes to <base>/eps_<epsilon>.
SolverConfig sweep_member(const SolverConfig& base, double epsilon);

struct SweepResult {
  std::vector<RunManifest> runs;
  std::vector<XiStudyRow> xi_rows;
};
/// One run per epsilon, then xi_vanishing.csv over the window [0, t_end].
SweepResult cmd_sweep(const SolverConfig& base, std::span<const double> epsilons);

struct DiagnoseReport {
  std::string csv_path;
  std::size_t rows = 0;
  /// In-run rows with a matching time that were compared, and how many of
  /// them agree bit for bit.
  std::size_t compared = 0;
  std::size_t identical = 0;
};
/// Recomputes the diagnostics of every snapshot below `run_dir` from
/// config.txt and writes diagnostics_recomputed.csv.
DiagnoseReport cmd_diagnose(const std::filesystem::path& run_dir);

struct ProfileCheckReport {
  bool ok = false;
  std::string json;
};
ProfileCheckReport cmd_profile_check();

/// {"error": kind, "message": ..., ["key": ...]} for the CLI's stderr.
std::string error_json(const std::exception& e);

}  // namespace obstacle_mcf
