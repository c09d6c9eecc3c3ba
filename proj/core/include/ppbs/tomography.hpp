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

// Simulated tomographic counting and maximum-likelihood reconstruction of
// two-qubit states and processes.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppbs/qubits.hpp"

namespace ppbs {

enum class Basis1Q { kH, kV, kD, kA, kR, kL };

std::string to_string(Basis1Q b);
std::optional<Basis1Q> basis_from_char(char c);
Vec2 basis_ket(Basis1Q b);

struct MeasurementSetting {
  Basis1Q control = Basis1Q::kH;
  Basis1Q target = Basis1Q::kH;

  Mat4 projector() const;
  /// Two letters, e.g. "HD".
  std::string label() const;
  static std::optional<MeasurementSetting> parse(std::string_view label);
  bool operator==(const MeasurementSetting&) const = default;
};

/// All 36 pairs from {H, V, D, A, R, L}.
std::vector<MeasurementSetting> overcomplete_settings();
/// The 16 pairs from {H, V, D, R}.
std::vector<MeasurementSetting> minimal_settings();

struct CountRecord {
  MeasurementSetting setting;
  std::uint64_t count = 0;
  /// Expected counts per setting for a unit-probability outcome.
  double total_scale = 0.0;
  std::uint64_t rng_seed = 0;
};

/// Named random stream derived from a run seed. Streams with different
/// (stage, index) are independent of evaluation order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stage,
                          std::uint64_t index);

/// Stage identifiers used by stream_seed across the library.
enum class RngStage : std::uint64_t {
  kCounts = 1,
  kBootstrap = 2,
  kOptimizerStarts = 3,
  kReconstructionStarts = 4,
  kPreparation = 5,
};

/// total_scale * rate * Tr[rho Pi] per setting.
std::vector<double> expected_counts(const TwoQubitState& state,
                                    std::span<const MeasurementSetting> settings,
                                    double total_scale, double rate = 1.0);

/// Poisson counts around expected_counts, one independent stream per
/// setting. `rate` scales the means (post-selection success probability).
std::vector<CountRecord> simulate_counts(
    const TwoQubitState& state, std::span<const MeasurementSetting> settings,
    double total_scale, std::uint64_t seed, double rate = 1.0);

struct ReconstructionOptions {
  int starts = 5;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  std::uint64_t seed = 20060101;
};

struct StateEstimate {
  TwoQubitState state = TwoQubitState::maximally_mixed();
  /// Fitted counts scale, sum_k lambda_k / sum_k Tr[Pi_k rho].
  double intensity = 0.0;
  double negative_log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after every accepted iterate of the winning start.
  std::vector<double> history;
};

/// Poisson maximum likelihood over rho = T^dagger T / Tr[T^dagger T] with T
/// triangular. Throws DomainError for tomographically incomplete settings,
/// negative data or all-zero data.
StateEstimate reconstruct_state_detailed(
    std::span<const MeasurementSetting> settings, std::span<const double> data,
    const ReconstructionOptions& options = {});

StateEstimate reconstruct_state_detailed(std::span<const CountRecord> records,
                                         const ReconstructionOptions& options = {});

TwoQubitState reconstruct_state(std::span<const CountRecord> records,
                                const ReconstructionOptions& options = {});

/// Products of {H, V, D, R} on each qubit, control-major.
std::vector<TwoQubitState> preparation_states();

struct ProcessEstimate {
  ChiMatrix chi = ChiMatrix(Mat16::Identity() / 16.0);
  /// Trace of the fitted chi before normalization; equals the mean success
  /// probability when outputs are weighted by their success probabilities.
  double trace = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Least-squares fit of a completely positive chi = T^dagger T to the
/// observed outputs, output_i * weight_i = E(input_i). Weights default to
/// one (trace-preserving data); pass success probabilities for post-selected
/// processes. Throws DomainError when the inputs do not span operator space.
ProcessEstimate reconstruct_process_detailed(
    std::span<const TwoQubitState> inputs, std::span<const TwoQubitState> outputs,
    std::span<const double> weights = {},
    const ReconstructionOptions& options = {});

ChiMatrix reconstruct_process(std::span<const TwoQubitState> inputs,
                              std::span<const TwoQubitState> outputs,
                              std::span<const double> weights = {});

/// Ideal CZ: chi = a a^dagger with a = (II + IZ + ZI - ZZ)/2.
ChiMatrix chi_ideal_cz();

struct ErrorEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  int successful = 0;
  int failures = 0;
};

using CountEstimator = std::function<double(std::span<const CountRecord>)>;

/// Parametric bootstrap: every resample redraws each count as
/// Poisson(observed count) and re-runs `estimator`. Resamples on which the
/// estimator throws are excluded and counted as failures.
ErrorEstimate monte_carlo_errors(std::span<const CountRecord> records,
                                 int n_resamples,
                                 const CountEstimator& estimator,
                                 std::uint64_t seed);

}  // namespace ppbs
