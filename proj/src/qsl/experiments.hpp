#pragma once

#include <filesystem>
#include <string>

#include "qsl/config.hpp"

namespace qsl {

enum class RunStatus { ok = 0, config_error = 1, numerical_failure = 2, partial = 3 };

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::filesystem::path manifest;
  std::size_t files = 0;
  std::size_t failures = 0;
};

/// Runs one experiment and writes its files plus manifest.json under
/// config.output_dir. Invalid configs throw ConfigError; failures of single
/// grid points or states are recorded in the manifest and the run continues.
RunResult run_experiment(const ExperimentConfig& config);

/// SHA-256 of the canonical YAML form.
std::string config_hash(const ExperimentConfig& config);

}  // namespace qsl
