// Copyright 2026 The ppbs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configs and the pipelines behind the ppbs subcommands.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppbs/gates.hpp"
#include "ppbs/tomography.hpp"
#include "ppbs_cli/bundle.hpp"

namespace ppbs::cli {

enum class Pipeline {
  kSimulate,
  kStateTomography,
  kProcessTomography,
  kBellAnalysis,
  kCorrectionOptimization,
  kSweep,
};

std::string to_string(Pipeline p);
/// Throws ConfigError for unknown names.
Pipeline parse_pipeline(const std::string& name);

struct GateConfig {
  Architecture architecture = Architecture::kPPBS;
  std::array<double, 3> eta{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double overlap = 1.0;
  bool relabel = true;
};

struct SourceConfig {
  double phi = 0.0;
  /// Explicit density matrix; replaces the phi source when present.
  std::optional<Mat4> state;
  /// Weight of the maximally mixed state added to the source.
  double white_noise = 0.0;
};

enum class TomographyTarget { kOutput, kSource };

struct TomographyConfig {
  /// Expected counts per setting for a unit-probability outcome. Zero means
  /// noiseless (process tomography only).
  double counts = 0.0;
  bool overcomplete = true;
  int resamples = 0;
  std::optional<std::filesystem::path> counts_file;
  TomographyTarget target = TomographyTarget::kOutput;
};

struct SweepConfig {
  double overlap_start = 0.0;
  double overlap_stop = 1.0;
  int points = 11;
};

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::kSimulate;
  GateConfig gate;
  SourceConfig source;
  TomographyConfig tomography;
  SweepConfig sweep;
  int restarts = 20;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  OutputFormat format = OutputFormat::kText;
  nlohmann::json metadata = nlohmann::json::object();

  /// Structural and range checks that do not need the physics modules.
  /// ConfigError for a missing seed, DomainError for out-of-range values.
  void validate() const;
  bool stochastic() const;
};

/// Unknown keys and wrong types are ConfigErrors. `fallback` supplies the
/// pipeline when the document has none; a conflicting one is an error.
ExperimentConfig config_from_json(const nlohmann::json& j, Pipeline fallback);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path, Pipeline fallback);

/// Command-line values; every set field replaces the config's.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> format;
  std::optional<double> counts;
  std::optional<std::string> eta;
  std::optional<double> overlap;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// "A,B,C" or a single value for all three splitters.
std::array<double, 3> parse_eta(const std::string& text);

GateInstance build_gate(const GateConfig& config);
TwoQubitState source_density(const SourceConfig& config);

struct RunOutput {
  ResultBundle bundle;
  /// Simulated counts, written next to the bundle when non-empty.
  std::vector<CountRecord> counts;
};

/// Deterministic for a fixed config. Throws ConfigError, DomainError or
/// NullPostselection.
RunOutput run(const ExperimentConfig& config);

/// Writes the bundle plus counts.txt; returns every written path.
std::vector<std::filesystem::path> write_outputs(const RunOutput& output,
                                                 const ExperimentConfig& config);

/// Human-readable scalar listing for stdout.
std::string summary(const ResultBundle& bundle);

}  // namespace ppbs::cli
