#pragma once

// Configuration-driven experiments: JSON config in, CSV data and a JSON
// manifest out. The schema is documented in docs/config.md.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ladderqed/dynamics.hpp"

namespace ladderqed {

enum class ExperimentKind { bands, chiral_emission, loss_reflection, bound_state, size_sweep, dipole_rabi };

const char* to_string(ExperimentKind kind) noexcept;
/// Throws ConfigError for unknown names.
ExperimentKind experiment_from_string(const std::string& name);

struct NumericOptions {
  double stride = 0.5;
  double t_final = 100.0;
  double fit_from = 5.0;
  int band_points = 501;
  int quadrature_points = 20001;
  std::vector<double> snapshot_times;    ///< loss-reflection, in addition to t_final
  int d_max = 12;                        ///< size-sweep
  std::vector<double> delta_q_values;    ///< size-sweep contrast table
  bool dynamics = true;                  ///< bound-state: also propagate
  double plateau_from = 800.0;           ///< bound-state averaging window starts here
  bool profile = true;                   ///< bound-state eigenvector profile
  std::vector<int> distances;            ///< dipole-rabi J12 against D_q
  bool simulate_distances = false;
  double max_step_norm = 1.0;
  double series_tolerance = 1e-17;
};

/// One config field varied across independent runs.
struct SweepSpec {
  std::string field;  ///< e.g. "model.kappa", "emitters.g", "emitters.d_s"
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name;  ///< free label copied to the manifest
  ExperimentKind experiment = ExperimentKind::bands;
  LadderParams model;
  std::vector<EmitterSpec> emitters;
  NumericOptions numeric;
  std::optional<SweepSpec> sweep;
  std::string output = "out";

  /// Re-runs every physical and experiment-specific check. Throws
  /// ConfigError naming the offending field.
  void validate() const;
};

/// Strict parse: missing required fields and unknown keys are errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical, fully resolved JSON form.
std::string to_json(const ExperimentConfig& config, int indent = 2);

/// Sets a dotted field (e.g. "model.t", "numeric.stride", "emitters.0.g")
/// to a JSON literal; a value that is not valid JSON is taken as a string.
/// The result is re-parsed and validated.
ExperimentConfig with_override(const ExperimentConfig& config, const std::string& field,
                               const std::string& value);

/// Applies one sweep value to a copy of `config` (sweep cleared).
ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& field,
                                   double value);

std::vector<std::string> preset_names();
/// Throws ConfigError listing the valid names for an unknown preset.
ExperimentConfig preset(const std::string& name);

struct RunReport {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  std::map<std::string, double> derived;
  std::vector<std::string> warnings;
  std::vector<RunReport> children;  ///< one per sweep value
};

/// Executes the experiment below `output_root / config.output`. Sweep values
/// run in parallel, each in its own subdirectory.
RunReport run(const ExperimentConfig& config, const std::filesystem::path& output_root = {});

std::string version();

}  // namespace ladderqed
