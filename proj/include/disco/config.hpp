#pragma once

// Flat `key = value` experiment files. `#` starts a comment, lists are
// comma-separated, and keys name ExperimentSpec / DetectorConfig fields.

#include "disco/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace disco {

/// Parses a config stream onto the defaults. Errors carry "<source>:<line>:".
ExperimentSpec parse_experiment(std::istream& in, const std::string& source = "config");
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace disco
