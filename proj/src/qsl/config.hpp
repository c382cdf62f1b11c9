#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qsl/core.hpp"
#include "qsl/dynamics.hpp"

namespace qsl {

enum class ExperimentKind {
  steady_tiles,
  wigner_cuts,
  evolution_snapshots,
  coherence_tiles,
  negativity_traces,
  gap_tiles,
  tss_tiles,
  tss_slices,
  derive_eom,
};

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& name);
bool needs_steady_state(ExperimentKind kind);

struct AxisConfig {
  double min = 0.1;
  double max = 100.0;
  int count = 6;
  bool log = true;

  std::vector<double> values() const;
  friend bool operator==(const AxisConfig&, const AxisConfig&) = default;
};

struct StateConfig {
  std::string kind = "fock";  // fock, thermal, coherent, cat, superposition
  int n = 0;
  double mean = 0.0;
  double beta_re = 0.0;
  double beta_im = 0.0;
  double phi = 0.0;
  std::vector<std::tuple<int, double, double>> terms;  // level, re, im

  StateSpec spec() const;
  std::string label() const;
  friend bool operator==(const StateConfig&, const StateConfig&) = default;
};

/// Initial state of a named kind carrying `energy` quanta on average.
StateConfig state_with_energy(const std::string& kind, double energy);

struct CaseConfig {
  std::string label;
  SLParams params;
  StateConfig state;
  std::vector<double> times;
  friend bool operator==(const CaseConfig&, const CaseConfig&) = default;
};

struct SliceConfig {
  std::string vary = "B";  // axis that varies; the other is held at `fixed`
  double fixed = 1.0;
  AxisConfig axis{0.01, 100.0, 8, true};
  friend bool operator==(const SliceConfig&, const SliceConfig&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::derive_eom;
  std::string output_dir = "out";
  int workers = 1;
  double basis_kappa1 = 0.1;
  AxisConfig grid_a{0.1, 100.0, 6, true};
  AxisConfig grid_b{0.01, 100.0, 6, true};
  std::vector<int> dims{30};
  std::vector<SLParams> params;
  std::vector<StateConfig> states;
  std::vector<CaseConfig> cases;
  std::vector<std::string> state_kinds;
  std::vector<double> energies;
  double t_end = 10.0;
  double sample_every = 0.0;
  double atol = 1e-10;
  double rtol = 1e-8;
  double epsilon = 1e-3;
  double t_cap = 1e6;
  int wigner_points = 201;
  double wigner_half_width = 0.0;  // 0 picks the extent from the state energy
  SliceConfig slice;
  bool latex = true;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ParseError (with line and column) for malformed YAML and
/// ConfigError (with the field path) for schema violations.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical YAML; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ExperimentConfig& config);

/// Field-level checks; throws ConfigError listing every problem found.
void check_config(const ExperimentConfig& config);

/// Regime grid points (A, B) in row-major order (A outer).
std::vector<std::pair<double, double>> regime_points(const ExperimentConfig& config);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double estimated_seconds = 0.0;
  std::string cost_summary;

  std::string text() const;
};

/// Schema check plus dimension pre-flight (n_hi against N per point) and a
/// rough cost estimate. Parse failures are reported as errors, not thrown.
ValidationReport validate_config_text(const std::string& yaml_text);
ValidationReport validate_config(const ExperimentConfig& config);

}  // namespace qsl
