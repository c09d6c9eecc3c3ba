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

#include "ppbs/gates.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "minimize.hpp"

namespace ppbs {
namespace {

constexpr double kPi = std::numbers::pi;

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

// Jones vector (H, V order) of the polarization carrying logical `bit`.
Vec2 jones_for_bit(int bit) { return bit == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0); }

TwoQubitState relabel(const GateInstance& gate, const TwoQubitState& rho) {
  if (gate.relabeling == Relabel::kNone) return rho;
  const Mat4 xx = xx_matrix();
  return TwoQubitState::normalized(xx * rho.matrix() * xx);
}

}  // namespace

GateInstance build_ppbs_cz(double eta1, double eta2, double eta3, double overlap,
                           Relabel relabeling) {
  check_unit(eta1, "eta1");
  check_unit(eta2, "eta2");
  check_unit(eta3, "eta3");
  check_unit(overlap, "overlap V");
  GateInstance gate;
  gate.architecture = Architecture::kPPBS;
  gate.reflectivities = {eta1, eta2, eta3};
  gate.overlap = overlap;
  gate.relabeling = relabeling;
  gate.circuit = Circuit(2);
  gate.circuit.add(ppbs(0, 1, eta1, 1.0))
      .add(hwp(0, kPi / 4.0))
      .add(hwp(1, kPi / 4.0))
      .add(ppbs_tap(0, eta2, 1.0, Port::kA))
      .add(ppbs_tap(1, eta3, 1.0, Port::kB));
  gate.success_pattern = coincidence({0, 1});
  return gate;
}

GateInstance build_interferometric_cz(double eta, double overlap) {
  check_unit(eta, "eta");
  check_unit(overlap, "overlap V");
  GateInstance gate;
  gate.architecture = Architecture::kInterferometric;
  gate.reflectivities = {eta, eta, eta};
  gate.overlap = overlap;
  gate.relabeling = Relabel::kNone;
  // Paths: 0 control, 1 target, 2 control V rail, 3 target V rail.
  gate.circuit = Circuit(4);
  gate.circuit.add(polarizing_beamsplitter(0, 2))
      .add(polarizing_beamsplitter(1, 3))
      .add(beamsplitter(0, 1, eta))
      .add(ppbs_tap(2, eta, eta, Port::kA))
      .add(ppbs_tap(3, eta, eta, Port::kA))
      .add(phase(3, kPi))
      .add(polarizing_beamsplitter(0, 2))
      .add(polarizing_beamsplitter(1, 3));
  gate.success_pattern = coincidence({0, 1});
  return gate;
}

PhotonicState prepare_input(const GateInstance& gate, const Vec4& psi) {
  const auto reference = distinguishability_prepare(gate.overlap, WhichPhoton::kReference);
  const auto probe = distinguishability_prepare(gate.overlap, WhichPhoton::kProbe);
  std::vector<std::pair<cplx, PhotonicState>> parts;
  for (int j = 0; j < 4; ++j) {
    if (psi(j) == cplx(0.0)) continue;
    const std::array<Photon, 2> photons{
        make_photon(gate.control_path, jones_for_bit(j / 2), reference),
        make_photon(gate.target_path, jones_for_bit(j % 2), probe)};
    parts.emplace_back(psi(j), PhotonicState::from_photons(photons));
  }
  if (parts.empty()) throw DomainError("prepare_input: zero input vector");
  return PhotonicState::superpose(parts);
}

// Total absorption is a post-selection that keeps nothing.
static std::optional<PostselectResult> evolve_and_select(const GateInstance& gate, const Vec4& psi,
                                                         const TransferMatrix& m) {
  try {
    PostselectResult kept = postselect(evolve(prepare_input(gate, psi), m), gate.success_pattern);
    if (kept.null()) return std::nullopt;
    return kept;
  } catch (const PhotonsLost&) {
    return std::nullopt;
  }
}

std::vector<Mat4> induced_kraus(const GateInstance& gate) {
  const TransferMatrix m = compile(gate.circuit);
  std::map<std::pair<int, int>, Mat4> kraus;
  for (int j = 0; j < 4; ++j) {
    const auto kept = evolve_and_select(gate, Vec4::Unit(j), m);
    if (!kept) continue;
    const double scale = std::sqrt(kept->success_probability);
    for (const auto& [key, v] : qubit_branches(*kept->state, gate.control_path, gate.target_path)) {
      auto [it, _] = kraus.try_emplace(key, Mat4::Zero());
      it->second.col(j) = v * scale;
    }
  }
  std::vector<Mat4> out;
  const Mat4 xx = xx_matrix();
  for (auto& [_, k] : kraus) {
    if (k.cwiseAbs().maxCoeff() < kPruneThreshold) continue;
    out.push_back(gate.relabeling == Relabel::kXX ? Mat4(xx * k) : k);
  }
  return out;
}

Mat4 induced_operator(const GateInstance& gate) {
  const auto kraus = induced_kraus(gate);
  if (kraus.size() != 1) {
    throw DomainError("induced_operator: process has " + std::to_string(kraus.size()) +
                      " Kraus operators; use induced_kraus or process_chi");
  }
  return kraus.front();
}

ChiMatrix process_chi(const GateInstance& gate) {
  const auto kraus = induced_kraus(gate);
  if (kraus.empty()) throw NullPostselection("process_chi: gate never succeeds");
  return ChiMatrix::normalized(chi_from_kraus(kraus));
}

double mean_success_probability(const GateInstance& gate) {
  double p = 0.0;
  for (const auto& k : induced_kraus(gate)) p += (k.adjoint() * k).trace().real();
  return p / 4.0;
}

GateRun run_gate(const GateInstance& gate, const Vec4& psi) {
  const auto kept = evolve_and_select(gate, psi, compile(gate.circuit));
  GateRun run;
  if (!kept) return run;
  run.success_probability = kept->success_probability;
  run.output = relabel(gate, reduce_to_qubits(*kept->state, gate.control_path, gate.target_path));
  return run;
}

GateRun run_gate(const GateInstance& gate, const TwoQubitState& input) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(input.matrix());
  Mat4 total = Mat4::Zero();
  double probability = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double weight = es.eigenvalues()(i);
    if (weight < 1e-14) continue;
    const GateRun part = run_gate(gate, Vec4(es.eigenvectors().col(i)));
    if (!part.output) continue;
    total += weight * part.success_probability * part.output->matrix();
    probability += weight * part.success_probability;
  }
  GateRun run;
  if (!(probability > 0.0)) return run;
  run.success_probability = probability;
  run.output = TwoQubitState::normalized(total);
  return run;
}

Vec4 source_ket(double phi) {
  Vec4 psi = Vec4::Zero();
  psi(3) = 1.0 / std::sqrt(2.0);                      // HH
  psi(0) = std::polar(1.0 / std::sqrt(2.0), phi);     // VV
  return psi;
}

TwoQubitState source_state(double phi) { return TwoQubitState::pure(source_ket(phi)); }

std::string to_string(BellLabel label) {
  switch (label) {
    case BellLabel::kPsiPrimePlus: return "psi'+";
    case BellLabel::kPsiPrimeMinus: return "psi'-";
    case BellLabel::kPhiPrimePlus: return "phi'+";
    case BellLabel::kPhiPrimeMinus: return "phi'-";
  }
  return "?";
}

std::string to_string(BellOutcome outcome) {
  static const char* names[] = {"DD", "AD", "DA", "AA"};
  return names[static_cast<int>(outcome)];
}

std::string to_logical_string(BellOutcome outcome) {
  static const char* names[] = {"++", "-+", "+-", "--"};
  return names[static_cast<int>(outcome)];
}

std::array<BellInput, 4> bell_inputs() {
  using namespace kets;
  const double s = 1.0 / std::sqrt(2.0);
  const Vec4 ha = kron(h(), a()), vd = kron(v(), d());
  const Vec4 hd = kron(h(), d()), va = kron(v(), a());
  const std::array<std::pair<BellLabel, Vec4>, 4> kets{{
      {BellLabel::kPsiPrimePlus, s * (ha + vd)},
      {BellLabel::kPsiPrimeMinus, s * (ha - vd)},
      {BellLabel::kPhiPrimePlus, s * (hd + va)},
      {BellLabel::kPhiPrimeMinus, s * (hd - va)},
  }};
  auto make = [](const std::pair<BellLabel, Vec4>& p) {
    return BellInput{p.first, p.second, TwoQubitState::pure(p.second)};
  };
  return {make(kets[0]), make(kets[1]), make(kets[2]), make(kets[3])};
}

std::array<Vec4, 4> bell_outcome_kets() {
  using namespace kets;
  return {kron(d(), d()), kron(a(), d()), kron(d(), a()), kron(a(), a())};
}

BellAnalysis analyze_bell(const TwoQubitState& input, const GateInstance& gate) {
  const GateRun run = run_gate(gate, input);
  if (!run.output) throw NullPostselection("analyze_bell: no coincidence possible");
  const Mat4 frame = kron(pauli1()[3], Mat2(Mat2::Identity()));
  const Mat4 rho = frame * run.output->matrix() * frame.adjoint();
  BellAnalysis result;
  result.success_probability = run.success_probability;
  result.output = *run.output;
  const auto outcomes = bell_outcome_kets();
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    result.distribution[k] = std::max(0.0, outcomes[k].dot(rho * outcomes[k]).real());
    total += result.distribution[k];
  }
  for (double& p : result.distribution) p /= total;
  return result;
}

PhaseFit fit_output_phases(std::span<const TwoQubitState> outputs) {
  if (outputs.size() != 4) throw DomainError("fit_output_phases: need four outputs");
  static constexpr int kSigns[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  auto mean_fidelity = [&](double p1, double p2) {
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      // (V, H) order: |H> + s e^{ip}|V>
      const Vec2 c(static_cast<double>(kSigns[k][0]) * std::polar(1.0, p1), 1.0);
      const Vec2 t(static_cast<double>(kSigns[k][1]) * std::polar(1.0, p2), 1.0);
      const Vec4 psi = kron(c, t) / 2.0;
      total += psi.dot(outputs[k].matrix() * psi).real();
    }
    return total / 4.0;
  };
  const detail::Objective objective = [&](std::span<const double> x) {
    return -mean_fidelity(x[0], x[1]);
  };
  PhaseFit best;
  best.mean_fidelity = -1.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double p1 = -kPi + kPi * (i + 0.5) / 2.0;
      const double p2 = -kPi + kPi * (j + 0.5) / 2.0;
      const auto r = detail::minimize_simplex(objective, {p1, p2}, 0.3, 4000, 1e-12);
      if (-r.value > best.mean_fidelity) {
        best = {std::remainder(r.x[0], 2.0 * kPi), std::remainder(r.x[1], 2.0 * kPi), -r.value};
      }
    }
  }
  return best;
}

}  // namespace ppbs
