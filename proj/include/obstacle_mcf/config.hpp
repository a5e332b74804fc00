#pragma once

#include <string>

#include "obstacle_mcf/solver.hpp"

namespace obstacle_mcf {

// Flat key = value text, one pair per line, '#' starts a comment.
// Vectors are comma separated. Unknown or repeated keys are errors.

SolverConfig parse_config_text(const std::string& text);
/// Reads and parses a file; throws IoError if it cannot be read.
SolverConfig parse_config(const std::string& path);

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const SolverConfig& config);

}  // namespace obstacle_mcf
