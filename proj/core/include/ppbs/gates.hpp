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

// Concrete gate circuits: the partially-polarizing-beamsplitter CZ gate, the
// interferometric dual-rail reference gate, source states and the Bell-state
// analyser built on the CZ gate.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ppbs/fock.hpp"
#include "ppbs/optics.hpp"
#include "ppbs/qubits.hpp"

namespace ppbs {

/// Output relabeling. The PPBS circuit contains a bit flip on both qubits;
/// kXX undoes it in the bookkeeping instead of with extra wave plates.
enum class Relabel { kNone, kXX };

enum class Architecture { kPPBS, kInterferometric };

struct Reflectivities {
  double first = 1.0 / 3.0;
  double second = 1.0 / 3.0;
  double third = 1.0 / 3.0;
};

struct GateInstance {
  Architecture architecture = Architecture::kPPBS;
  Circuit circuit{2};
  Reflectivities reflectivities;
  /// Wavepacket overlap (HOM visibility) between the two input photons.
  double overlap = 1.0;
  Relabel relabeling = Relabel::kXX;
  int control_path = 0;
  int target_path = 1;
  SpatialPattern success_pattern;
};

/// Three PPBSs and two HWPs: PPBS(eta1 for H, full reflection for V) on
/// (control, target), HWP at 45 degrees on each path, then one PPBS per path
/// (eta2 on control, eta3 on target) whose second ports are discarded.
GateInstance build_ppbs_cz(double eta1, double eta2, double eta3,
                           double overlap = 1.0,
                           Relabel relabeling = Relabel::kXX);

/// Dual-rail gate: polarizing splitters move V to auxiliary rails (paths 2
/// and 3), the H modes meet on a splitter of reflectivity eta, the V rails
/// each take a loss of eta, and the rails are recombined. A pi phase on the
/// target's V rail is the interferometer's phase setting.
GateInstance build_interferometric_cz(double eta, double overlap = 1.0);

/// Photonic input for a two-qubit pure state, with the overlap-dependent
/// internal state on the target photon.
PhotonicState prepare_input(const GateInstance& gate, const Vec4& psi);

/// Post-selected Kraus operators of the gate, one per output internal
/// configuration, in the qubit basis (relabeling applied). Not normalized:
/// sum_k Tr[K_k rho K_k^dagger] is the success probability for rho.
std::vector<Mat4> induced_kraus(const GateInstance& gate);

/// The single post-selected operator of a gate with perfect overlap. Throws
/// DomainError when the gate has more than one Kraus operator.
Mat4 induced_operator(const GateInstance& gate);

/// Trace-normalized chi of the post-selected process.
ChiMatrix process_chi(const GateInstance& gate);

/// Success probability averaged over inputs (maximally mixed input).
double mean_success_probability(const GateInstance& gate);

struct GateRun {
  std::optional<TwoQubitState> output;
  double success_probability = 0.0;
};

/// Runs a pure input through the photonic simulation and post-selects.
GateRun run_gate(const GateInstance& gate, const Vec4& psi);
/// Mixed input: eigen-decomposition, one photonic run per eigenvector.
GateRun run_gate(const GateInstance& gate, const TwoQubitState& input);

/// (|HH> + e^{i phi}|VV>)/sqrt(2).
TwoQubitState source_state(double phi);
Vec4 source_ket(double phi);

enum class BellLabel { kPsiPrimePlus, kPsiPrimeMinus, kPhiPrimePlus,
                       kPhiPrimeMinus };
/// Analyser outcomes, control letter first.
enum class BellOutcome { kDD, kAD, kDA, kAA };

std::string to_string(BellLabel label);
std::string to_string(BellOutcome outcome);
/// Outcome in logical labels, D == "+", A == "-".
std::string to_logical_string(BellOutcome outcome);

struct BellInput {
  BellLabel label;
  Vec4 ket;
  TwoQubitState state;
};

/// |HA> +- |VD> and |HD> +- |VA>, normalized, in label order.
std::array<BellInput, 4> bell_inputs();

/// Separable states the ideal analyser maps the Bell inputs to, in label
/// order: DD, AD, DA, AA.
std::array<Vec4, 4> bell_outcome_kets();

struct BellAnalysis {
  /// Outcome probabilities in BellOutcome order; sums to one.
  std::array<double, 4> distribution{};
  double success_probability = 0.0;
  TwoQubitState output = TwoQubitState::maximally_mixed();
};

/// Sends `input` through the gate, post-selects and measures both qubits in
/// the D/A basis.
///
/// Readout convention: the control output passes a HWP at 0 degrees (a phase
/// flip) before its D/A analyser. With this frame the ideal gate maps
/// psi'+, psi'-, phi'+, phi'- to DD, AD, DA, AA respectively. Throws
/// NullPostselection when no coincidence is possible.
BellAnalysis analyze_bell(const TwoQubitState& input, const GateInstance& gate);

struct PhaseFit {
  double control_phase = 0.0;
  double target_phase = 0.0;
  /// Mean fidelity between the outputs and the fitted separable states.
  double mean_fidelity = 0.0;
};

/// Fits (|H> +- e^{i p1}|V>) x (|H> +- e^{i p2}|V>) to four analyser outputs
/// given in Bell-label order (sign pattern ++, -+, +-, --).
PhaseFit fit_output_phases(std::span<const TwoQubitState> outputs);

}  // namespace ppbs
