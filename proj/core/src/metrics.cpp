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

#include "ppbs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "minimize.hpp"
#include "ppbs/tomography.hpp"

namespace ppbs {
namespace {

// sqrt of a spectrum with round-off eigenvalues zeroed; sqrt(1e-17) would
// otherwise leak ~3e-9 into fidelities of rank-deficient states
Eigen::Vector4d root_spectrum(const Eigen::Vector4d& eig) {
  const double cut = 64.0 * std::numeric_limits<double>::epsilon() * eig.cwiseAbs().maxCoeff();
  return eig.unaryExpr([cut](double x) { return x > cut ? std::sqrt(x) : 0.0; });
}

Mat4 psd_sqrt(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  const Eigen::Vector4d root = root_spectrum(es.eigenvalues());
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double process_fidelity(const ChiMatrix& measured, const ChiMatrix& ideal) {
  return clamp01((measured.matrix() * ideal.matrix()).trace().real());
}

double average_gate_fidelity(double process_fidelity) {
  if (!(process_fidelity >= 0.0 && process_fidelity <= 1.0)) {
    throw DomainError("average_gate_fidelity: process fidelity must lie in [0, 1]");
  }
  return (4.0 * process_fidelity + 1.0) / 5.0;
}

double state_fidelity(const TwoQubitState& rho, const TwoQubitState& sigma) {
  const Mat4 root = psd_sqrt(rho.matrix());
  const Mat4 inner = root * sigma.matrix() * root;
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (inner + inner.adjoint()));
  const double t = root_spectrum(es.eigenvalues()).sum();
  return clamp01(t * t);
}

double state_fidelity(const TwoQubitState& rho, const Vec4& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0)) throw DomainError("state_fidelity: zero ket");
  return clamp01(psi.dot(rho.matrix() * psi).real() / n);
}

double concurrence(const TwoQubitState& rho) {
  const Mat4 yy = kron(pauli1()[2], pauli1()[2]);
  const Mat4 flipped = yy * rho.matrix().conjugate() * yy;
  const Mat4 root = psd_sqrt(rho.matrix());
  const Mat4 inner = root * flipped * root;
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (inner + inner.adjoint()));
  Eigen::Vector4d l = root_spectrum(es.eigenvalues());
  std::sort(l.data(), l.data() + 4, std::greater<>());
  return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

double tangle(const TwoQubitState& rho) {
  const double c = concurrence(rho);
  return clamp01(c * c);
}

double linear_entropy(const TwoQubitState& rho) {
  return clamp01(4.0 / 3.0 * (1.0 - rho.purity()));
}

Mat2 euler_unitary(double a, double b, double c) {
  auto rz = [](double t) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, -t / 2.0);
    m(1, 1) = std::polar(1.0, t / 2.0);
    return m;
  };
  Mat2 ry;
  ry << std::cos(b / 2.0), -std::sin(b / 2.0), std::sin(b / 2.0), std::cos(b / 2.0);
  return rz(a) * ry * rz(c);
}

Mat2 LocalCorrection::unitary(int which) const {
  return euler_unitary(angles[3 * which], angles[3 * which + 1], angles[3 * which + 2]);
}

Mat4 LocalCorrection::pre() const { return kron(unitary(0), unitary(1)); }
Mat4 LocalCorrection::post() const { return kron(unitary(2), unitary(3)); }

ChiMatrix LocalCorrection::apply(const ChiMatrix& chi) const {
  return ChiMatrix::normalized(conjugate_chi(chi.matrix(), pre(), post()));
}

CorrectionResult optimize_corrections(const ChiMatrix& process, const ChiMatrix& ideal,
                                      const CorrectionOptions& options) {
  if (options.restarts < 1) throw DomainError("optimize_corrections: need at least one restart");

  // chi_ideal = sum_k mu_k e_k e_k^dagger, E_k = sum_n e_kn P_n. For
  // chi' = C chi C^dagger with C_nm = Tr[P_n post P_m pre]/4,
  // Tr[chi' chi_ideal] = sum_k mu_k u_k^dagger chi u_k with
  // u_k = conj(pauli_coefficients(pre E_k^dagger post)).
  Eigen::SelfAdjointEigenSolver<Mat16> es(ideal.matrix());
  std::vector<std::pair<double, Mat4>> ideal_ops;
  for (int k = 0; k < 16; ++k) {
    const double mu = es.eigenvalues()(k);
    if (mu < 1e-14) continue;
    Mat4 e = Mat4::Zero();
    for (int n = 0; n < 16; ++n) e += es.eigenvectors()(n, k) * pauli2()[n];
    ideal_ops.emplace_back(mu, e.adjoint());
  }
  const Mat16& chi = process.matrix();

  auto fidelity = [&](std::span<const double> x) {
    LocalCorrection lc;
    std::copy(x.begin(), x.end(), lc.angles.begin());
    const Mat4 pre = lc.pre();
    const Mat4 post = lc.post();
    double f = 0.0;
    for (const auto& [mu, e_adj] : ideal_ops) {
      const Vec16 u = pauli_coefficients(pre * e_adj * post).conjugate();
      f += mu * u.dot(chi * u).real();
    }
    return f;
  };
  const detail::Objective objective = [&](std::span<const double> x) { return -fidelity(x); };

  CorrectionResult result;
  result.restarts = options.restarts;
  result.fidelity_before = process_fidelity(process, ideal);

  std::vector<double> values;
  detail::MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> x0(12, 0.0);
    if (r > 0) {
      std::mt19937_64 rng(stream_seed(options.seed, static_cast<std::uint64_t>(RngStage::kOptimizerStarts), r));
      std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
      for (double& a : x0) a = angle(rng);
    }
    auto run = detail::minimize_simplex(objective, x0, 0.5, options.max_iterations,
                                        options.simplex_tolerance);
    values.push_back(-run.value);
    if (run.value < best.value) best = std::move(run);
  }
  const double best_f = -best.value;
  result.restarts_at_best = static_cast<int>(
      std::count_if(values.begin(), values.end(), [&](double v) { return best_f - v <= 1e-4; }));
  result.converged = best.converged;
  std::copy(best.x.begin(), best.x.end(), result.correction.angles.begin());
  result.fidelity_after =
      std::max(result.fidelity_before, process_fidelity(result.correction.apply(process), ideal));
  return result;
}

double TruthTable::mean_diagonal() const { return probabilities.diagonal().mean(); }

TruthTable truth_table(const GateInstance& gate, std::span<const BellInput> inputs) {
  if (inputs.size() != 4) throw DomainError("truth_table: need the four Bell inputs");
  TruthTable table;
  for (int i = 0; i < 4; ++i) {
    const BellAnalysis a = analyze_bell(inputs[i].state, gate);
    for (int j = 0; j < 4; ++j) table.probabilities(i, j) = a.distribution[j];
    table.success_probabilities[i] = a.success_probability;
    table.outputs[i] = a.output;
  }
  return table;
}

TruthTable truth_table(const GateInstance& gate) {
  const auto inputs = bell_inputs();
  return truth_table(gate, inputs);
}

Eigen::MatrixXd mutual_fidelity_matrix(std::span<const TwoQubitState> states) {
  if (states.size() < 2) throw DomainError("mutual_fidelity_matrix: need at least two states");
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = state_fidelity(states[i], states[j]);
    }
  }
  return m;
}

double mean_off_diagonal(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (n < 2) return 0.0;
  return (m.sum() - m.trace()) / static_cast<double>(n * (n - 1));
}

OverlapSolution solve_overlap_for_truth_table(double target, Reflectivities eta,
                                              double tolerance) {
  auto mean_diag = [&](double v) {
    return truth_table(build_ppbs_cz(eta.first, eta.second, eta.third, v)).mean_diagonal();
  };
  double lo = 0.0, hi = 1.0;
  double f_lo = mean_diag(lo), f_hi = mean_diag(hi);
  if ((f_lo - target) * (f_hi - target) > 0.0) {
    throw DomainError("solve_overlap_for_truth_table: target not bracketed by V in [0, 1]");
  }
  OverlapSolution sol;
  while (hi - lo > tolerance && sol.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mean_diag(mid);
    if ((f_lo - target) * (f_mid - target) <= 0.0) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
    ++sol.iterations;
  }
  sol.overlap = 0.5 * (lo + hi);
  sol.mean_diagonal = mean_diag(sol.overlap);
  return sol;
}

}  // namespace ppbs
