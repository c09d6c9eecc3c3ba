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

// Figures of merit and the local-unitary correction search.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ppbs/gates.hpp"
#include "ppbs/qubits.hpp"

namespace ppbs {

/// Tr[chi_meas chi_ideal].
double process_fidelity(const ChiMatrix& measured, const ChiMatrix& ideal);

/// (4 F_P + 1) / 5 for two qubits.
double average_gate_fidelity(double process_fidelity);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const TwoQubitState& rho, const TwoQubitState& sigma);
/// <psi|rho|psi> for a normalized ket.
double state_fidelity(const TwoQubitState& rho, const Vec4& psi);

/// Squared Wootters concurrence.
double concurrence(const TwoQubitState& rho);
double tangle(const TwoQubitState& rho);
/// (4/3)(1 - Tr[rho^2]): zero for pure states, one for the maximally mixed.
double linear_entropy(const TwoQubitState& rho);

/// Euler-angle single-qubit unitary Rz(a) Ry(b) Rz(c), global phase dropped.
Mat2 euler_unitary(double a, double b, double c);

struct LocalCorrection {
  /// pre-control, pre-target, post-control, post-target; 3 angles each.
  std::array<double, 12> angles{};

  Mat2 unitary(int which) const;
  Mat4 pre() const;
  Mat4 post() const;
  /// chi of rho -> post E(pre rho pre^dagger) post^dagger.
  ChiMatrix apply(const ChiMatrix& chi) const;
};

struct CorrectionOptions {
  int restarts = 20;
  int max_iterations = 20000;
  double simplex_tolerance = 1e-9;
  std::uint64_t seed = 7;
};

struct CorrectionResult {
  LocalCorrection correction;
  double fidelity_before = 0.0;
  double fidelity_after = 0.0;
  /// Number of restarts whose optimum is within 1e-4 of the best.
  int restarts_at_best = 0;
  int restarts = 0;
  bool converged = false;
};

/// Multi-start simplex search over the 12 correction angles maximizing
/// Tr[chi' chi_ideal]. The first start is the identity, so the result never
/// falls below the uncorrected fidelity.
CorrectionResult optimize_corrections(const ChiMatrix& process,
                                      const ChiMatrix& ideal,
                                      const CorrectionOptions& options = {});

/// Rows: Bell inputs (label order); columns: DD, AD, DA, AA.
struct TruthTable {
  Eigen::Matrix4d probabilities = Eigen::Matrix4d::Zero();
  std::array<double, 4> success_probabilities{};
  std::array<TwoQubitState, 4> outputs{
      TwoQubitState::maximally_mixed(), TwoQubitState::maximally_mixed(),
      TwoQubitState::maximally_mixed(), TwoQubitState::maximally_mixed()};

  /// Mean probability of the correct outcome.
  double mean_diagonal() const;
};

TruthTable truth_table(const GateInstance& gate,
                       std::span<const BellInput> inputs);
TruthTable truth_table(const GateInstance& gate);

/// Pairwise fidelities; symmetric with unit diagonal. Needs >= 2 states.
Eigen::MatrixXd mutual_fidelity_matrix(std::span<const TwoQubitState> states);
double mean_off_diagonal(const Eigen::MatrixXd& m);

struct OverlapSolution {
  double overlap = 0.0;
  double mean_diagonal = 0.0;
  int iterations = 0;
};

/// Bisection on the PPBS gate's overlap V so that the truth table's mean
/// diagonal hits `target`. Throws DomainError when the target is not
/// bracketed by V = 0 and V = 1.
OverlapSolution solve_overlap_for_truth_table(double target,
                                              Reflectivities eta = {},
                                              double tolerance = 1e-9);

}  // namespace ppbs
