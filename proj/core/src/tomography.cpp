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

#include "ppbs/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "minimize.hpp"
#include "ppbs/errors.hpp"

namespace ppbs {
namespace {

using MatX = Eigen::MatrixXcd;

// Upper-triangular T with real diagonal, packed as
// [T_00 .. T_dd, Re T_01, Im T_01, Re T_02, ...].
int packed_size(int d) { return d + d * (d - 1); }

MatX unpack(std::span<const double> x, int d) {
  MatX t = MatX::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) t(i, i) = x[k++];
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      t(i, j) = cplx(x[k], x[k + 1]);
      k += 2;
    }
  }
  return t;
}

std::vector<double> pack(const MatX& t) {
  const int d = static_cast<int>(t.rows());
  std::vector<double> x(packed_size(d));
  int k = 0;
  for (int i = 0; i < d; ++i) x[k++] = t(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      x[k++] = t(i, j).real();
      x[k++] = t(i, j).imag();
    }
  }
  return x;
}

// Gradient with respect to the packed T of a function whose differential is
// df = 2 Re Tr[g_eff T^dagger dT].
void pack_gradient(const MatX& g_eff, const MatX& t, std::span<double> grad) {
  const int d = static_cast<int>(t.rows());
  const MatX m = g_eff * t.adjoint();
  int k = 0;
  for (int i = 0; i < d; ++i) grad[k++] = 2.0 * m(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      grad[k++] = 2.0 * m(j, i).real();
      grad[k++] = -2.0 * m(j, i).imag();
    }
  }
}

// Clips negative eigenvalues of a Hermitian matrix.
MatX project_psd(const MatX& h) {
  const MatX herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatX> es(herm);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

// Triangular T with T^dagger T = psd.
MatX triangular_factor(const MatX& psd) {
  const int d = static_cast<int>(psd.rows());
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (psd + psd.adjoint()));
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatX b = root.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::HouseholderQR<MatX> qr(b);
  MatX r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) r.row(i) *= std::conj(r(i, i)) / mag;
  }
  return r;
}

MatX random_factor(int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatX g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = cplx(normal(rng), normal(rng));
  }
  MatX rho = g.adjoint() * g;
  rho *= scale / rho.trace().real();
  return triangular_factor(rho);
}

int numerical_rank(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > 1e-9 * s(0)).count());
}

template <typename Fn>
detail::MinimizeResult best_of_starts(const Fn& objective, const std::vector<MatX>& starts,
                                      int max_iterations, double gradient_tol,
                                      double stop_below) {
  detail::MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    auto r = detail::minimize_bfgs(objective, pack(start), max_iterations, gradient_tol);
    if (r.value < best.value) best = std::move(r);
    if (best.value < stop_below) break;
  }
  return best;
}

}  // namespace

std::string to_string(Basis1Q b) {
  static const char* names[] = {"H", "V", "D", "A", "R", "L"};
  return names[static_cast<int>(b)];
}

std::optional<Basis1Q> basis_from_char(char c) {
  switch (c) {
    case 'H': return Basis1Q::kH;
    case 'V': return Basis1Q::kV;
    case 'D': return Basis1Q::kD;
    case 'A': return Basis1Q::kA;
    case 'R': return Basis1Q::kR;
    case 'L': return Basis1Q::kL;
    default: return std::nullopt;
  }
}

Vec2 basis_ket(Basis1Q b) {
  switch (b) {
    case Basis1Q::kH: return kets::h();
    case Basis1Q::kV: return kets::v();
    case Basis1Q::kD: return kets::d();
    case Basis1Q::kA: return kets::a();
    case Basis1Q::kR: return kets::r();
    case Basis1Q::kL: return kets::l();
  }
  return kets::h();
}

Mat4 MeasurementSetting::projector() const {
  const Vec4 psi = kron(basis_ket(control), basis_ket(target));
  return psi * psi.adjoint();
}

std::string MeasurementSetting::label() const { return to_string(control) + to_string(target); }

std::optional<MeasurementSetting> MeasurementSetting::parse(std::string_view label) {
  if (label.size() != 2) return std::nullopt;
  const auto c = basis_from_char(label[0]);
  const auto t = basis_from_char(label[1]);
  if (!c || !t) return std::nullopt;
  return MeasurementSetting{*c, *t};
}

std::vector<MeasurementSetting> overcomplete_settings() {
  std::vector<MeasurementSetting> out;
  for (int c = 0; c < 6; ++c) {
    for (int t = 0; t < 6; ++t) out.push_back({Basis1Q(c), Basis1Q(t)});
  }
  return out;
}

std::vector<MeasurementSetting> minimal_settings() {
  const Basis1Q set[] = {Basis1Q::kH, Basis1Q::kV, Basis1Q::kD, Basis1Q::kR};
  std::vector<MeasurementSetting> out;
  for (auto c : set) {
    for (auto t : set) out.push_back({c, t});
  }
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t{words[0]} << 32) | words[1];
}

std::vector<double> expected_counts(const TwoQubitState& state,
                                    std::span<const MeasurementSetting> settings,
                                    double total_scale, double rate) {
  if (!(total_scale > 0.0) || !std::isfinite(total_scale)) {
    throw DomainError("total_scale must be positive");
  }
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("rate must lie in [0, 1]");
  std::vector<double> out;
  out.reserve(settings.size());
  for (const auto& s : settings) {
    const double p = (state.matrix() * s.projector()).trace().real();
    out.push_back(total_scale * rate * std::max(0.0, p));
  }
  return out;
}

std::vector<CountRecord> simulate_counts(const TwoQubitState& state,
                                         std::span<const MeasurementSetting> settings,
                                         double total_scale, std::uint64_t seed, double rate) {
  const auto means = expected_counts(state, settings, total_scale, rate);
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    std::uint64_t n = 0;
    if (means[i] > 0.0) {
      std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(RngStage::kCounts), i));
      std::poisson_distribution<std::uint64_t> poisson(means[i]);
      n = poisson(rng);
    }
    out.push_back({settings[i], n, total_scale, seed});
  }
  return out;
}

StateEstimate reconstruct_state_detailed(std::span<const MeasurementSetting> settings,
                                         std::span<const double> data,
                                         const ReconstructionOptions& options) {
  if (settings.size() != data.size()) {
    throw DomainError("reconstruct_state: settings and data sizes differ");
  }
  const int k_settings = static_cast<int>(settings.size());
  double total = 0.0;
  for (double n : data) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("reconstruct_state: negative or non-finite count");
    total += n;
  }
  if (!(total > 0.0)) throw DomainError("reconstruct_state: all counts are zero");

  std::vector<Mat4> proj;
  proj.reserve(settings.size());
  Eigen::MatrixXd design(k_settings, 16);
  for (int k = 0; k < k_settings; ++k) {
    proj.push_back(settings[k].projector());
    for (int m = 0; m < 16; ++m) design(k, m) = (proj[k] * pauli2()[m]).trace().real();
  }
  if (numerical_rank(design) < 16) {
    throw DomainError("reconstruct_state: measurement settings are not tomographically complete");
  }

  // Linear inversion seeds the likelihood search.
  const Eigen::VectorXd n_vec = Eigen::Map<const Eigen::VectorXd>(data.data(), k_settings);
  const Eigen::VectorXd coeffs = design.colPivHouseholderQr().solve(n_vec);
  MatX linear = MatX::Zero(4, 4);
  for (int m = 0; m < 16; ++m) linear += coeffs(m) * pauli2()[m];
  MatX warm = project_psd(linear);
  if (warm.trace().real() <= 1e-12 * total) warm = MatX::Identity(4, 4);
  double predicted = 0.0;
  for (const auto& p : proj) predicted += (warm * p).trace().real();
  warm *= total / predicted;

  // Tr[X sum_k Pi_k] / Tr[X] for X proportional to the identity.
  Mat4 sum_proj = Mat4::Zero();
  for (const auto& p : proj) sum_proj += p;
  const double sum_proj_trace = sum_proj.trace().real() / 4.0;

  const auto objective = [&](std::span<const double> x, std::span<double> grad) {
    const MatX t = unpack(x, 4);
    const MatX rho = t.adjoint() * t;
    double f = 0.0;
    MatX g = MatX::Zero(4, 4);
    for (int k = 0; k < k_settings; ++k) {
      const double lambda = (rho * proj[k]).trace().real();
      const double n = data[k];
      if (n > 0.0) {
        if (!(lambda > 0.0)) return std::numeric_limits<double>::infinity();
        f += lambda - n - n * std::log(lambda / n);
        g += (1.0 - n / lambda) * proj[k];
      } else {
        f += lambda;
        g += proj[k];
      }
    }
    pack_gradient(g / total, t, grad);
    return f / total;
  };

  std::vector<MatX> starts{triangular_factor(warm)};
  for (int s = 1; s < options.starts; ++s) {
    std::mt19937_64 rng(stream_seed(options.seed, static_cast<std::uint64_t>(RngStage::kReconstructionStarts), s));
    starts.push_back(random_factor(4, total / sum_proj_trace, rng));
  }
  const auto best = best_of_starts(objective, starts, options.max_iterations,
                                   options.gradient_tolerance, -1.0);

  const MatX t = unpack(best.x, 4);
  const Mat4 rho = t.adjoint() * t;
  StateEstimate est;
  est.state = TwoQubitState::normalized(rho);
  est.intensity = rho.trace().real();
  est.negative_log_likelihood = best.value;
  est.iterations = best.iterations;
  est.converged = best.converged;
  est.history = best.history;
  return est;
}

StateEstimate reconstruct_state_detailed(std::span<const CountRecord> records,
                                         const ReconstructionOptions& options) {
  std::vector<MeasurementSetting> settings;
  std::vector<double> data;
  for (const auto& r : records) {
    settings.push_back(r.setting);
    data.push_back(static_cast<double>(r.count));
  }
  return reconstruct_state_detailed(settings, data, options);
}

TwoQubitState reconstruct_state(std::span<const CountRecord> records,
                                const ReconstructionOptions& options) {
  return reconstruct_state_detailed(records, options).state;
}

std::vector<TwoQubitState> preparation_states() {
  const Basis1Q set[] = {Basis1Q::kH, Basis1Q::kV, Basis1Q::kD, Basis1Q::kR};
  std::vector<TwoQubitState> out;
  for (auto c : set) {
    for (auto t : set) out.push_back(TwoQubitState::pure(kron(basis_ket(c), basis_ket(t))));
  }
  return out;
}

ProcessEstimate reconstruct_process_detailed(std::span<const TwoQubitState> inputs,
                                             std::span<const TwoQubitState> outputs,
                                             std::span<const double> weights,
                                             const ReconstructionOptions& options) {
  if (inputs.size() != outputs.size()) {
    throw DomainError("reconstruct_process: inputs and outputs differ in number");
  }
  if (!weights.empty() && weights.size() != inputs.size()) {
    throw DomainError("reconstruct_process: one weight per output required");
  }
  const int n_in = static_cast<int>(inputs.size());
  const auto& p = pauli2();

  // design((i, a, b), (m, n)) = (P_m rho_i P_n)_ab
  MatX design(16 * n_in, 256);
  Eigen::VectorXcd target(16 * n_in);
  for (int i = 0; i < n_in; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("reconstruct_process: invalid weight");
    for (int m = 0; m < 16; ++m) {
      const Mat4 left = p[m] * inputs[i].matrix();
      for (int n = 0; n < 16; ++n) {
        const Mat4 term = left * p[n];
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) design(16 * i + 4 * a + b, 16 * m + n) = term(a, b);
        }
      }
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) target(16 * i + 4 * a + b) = w * outputs[i].matrix()(a, b);
    }
  }
  Eigen::ColPivHouseholderQR<MatX> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 256) {
    throw DomainError("reconstruct_process: preparations do not span operator space");
  }
  const double target_norm2 = target.squaredNorm();
  if (!(target_norm2 > 0.0)) throw DomainError("reconstruct_process: all outputs have zero weight");

  const Eigen::VectorXcd linear = qr.solve(target);
  MatX chi_linear(16, 16);
  for (int m = 0; m < 16; ++m) {
    for (int n = 0; n < 16; ++n) chi_linear(m, n) = linear(16 * m + n);
  }
  MatX warm = project_psd(chi_linear);
  if (warm.trace().real() <= 0.0) warm = MatX::Identity(16, 16) / 16.0;

  // |A x - y|^2 = x^H G x - 2 Re(b^H x) + |y|^2 with G = A^H A, b = A^H y
  const MatX gram = design.adjoint() * design;
  const Eigen::VectorXcd projected = design.adjoint() * target;
  const auto objective = [&](std::span<const double> x, std::span<double> grad) {
    const MatX t = unpack(x, 16);
    const MatX chi = t.adjoint() * t;
    const Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(
        MatX(chi.transpose()).data(), 256);  // row-major (m, n) -> 16 m + n
    const Eigen::VectorXcd gx = gram * flat;
    const Eigen::VectorXcd g = gx - projected;
    const double value = flat.dot(gx).real() - 2.0 * projected.dot(flat).real() + target_norm2;
    MatX gm(16, 16);
    for (int m = 0; m < 16; ++m) {
      for (int n = 0; n < 16; ++n) gm(m, n) = g(16 * m + n);
    }
    pack_gradient((gm + gm.adjoint()) / target_norm2, t, grad);
    return std::max(0.0, value) / target_norm2;
  };

  std::vector<MatX> starts{triangular_factor(warm)};
  const double warm_scale = warm.trace().real();
  for (int s = 1; s < options.starts; ++s) {
    std::mt19937_64 rng(stream_seed(options.seed, static_cast<std::uint64_t>(RngStage::kReconstructionStarts), s));
    starts.push_back(random_factor(16, warm_scale, rng));
  }
  // A warm start at zero residual is already the global optimum.
  const auto best = best_of_starts(objective, starts, options.max_iterations,
                                   options.gradient_tolerance, 1e-24);

  const MatX t = unpack(best.x, 16);
  const Mat16 chi = t.adjoint() * t;
  ProcessEstimate est;
  est.chi = ChiMatrix::normalized(chi);
  est.trace = chi.trace().real();
  est.residual = best.value;
  est.iterations = best.iterations;
  est.converged = best.converged;
  est.history = best.history;
  return est;
}

ChiMatrix reconstruct_process(std::span<const TwoQubitState> inputs,
                              std::span<const TwoQubitState> outputs,
                              std::span<const double> weights) {
  return reconstruct_process_detailed(inputs, outputs, weights).chi;
}

ChiMatrix chi_ideal_cz() {
  const Vec16 a = pauli_coefficients(cz_matrix());
  return ChiMatrix(a * a.adjoint());
}

ErrorEstimate monte_carlo_errors(std::span<const CountRecord> records, int n_resamples,
                                 const CountEstimator& estimator, std::uint64_t seed) {
  if (n_resamples < 2) throw DomainError("monte_carlo_errors: need at least two resamples");
  std::vector<double> values;
  values.reserve(n_resamples);
  ErrorEstimate out;
  std::vector<CountRecord> resample(records.begin(), records.end());
  for (int r = 0; r < n_resamples; ++r) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(RngStage::kBootstrap), r));
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto observed = records[i].count;
      if (observed == 0) {
        resample[i].count = 0;
      } else {
        std::poisson_distribution<std::uint64_t> poisson(static_cast<double>(observed));
        resample[i].count = poisson(rng);
      }
    }
    try {
      const double v = estimator(resample);
      if (!std::isfinite(v)) throw DomainError("non-finite estimate");
      values.push_back(v);
    } catch (const std::exception&) {
      ++out.failures;
    }
  }
  out.successful = static_cast<int>(values.size());
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (values.size() - 1));
  }
  return out;
}

}  // namespace ppbs
