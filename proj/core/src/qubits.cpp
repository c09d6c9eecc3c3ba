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

#include "ppbs/qubits.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ppbs/errors.hpp"

namespace ppbs {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const cplx kI(0.0, 1.0);

// (V, H) order: index 0 is V.
Vec2 make(cplx h, cplx v) {
  Vec2 out;
  out << v, h;
  return out;
}

template <typename M>
void check_density(const M& m, double tol, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite entries");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw DomainError(std::string(what) + ": matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<M> es(m);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw DomainError(std::string(what) + ": matrix is not positive semidefinite");
  }
  if (std::abs(m.trace() - cplx(1.0)) > tol) {
    throw DomainError(std::string(what) + ": trace is not one");
  }
}

}  // namespace

namespace kets {
Vec2 h() { return make(1.0, 0.0); }
Vec2 v() { return make(0.0, 1.0); }
Vec2 d() { return make(kInvSqrt2, kInvSqrt2); }
Vec2 a() { return make(kInvSqrt2, -kInvSqrt2); }
Vec2 r() { return make(kInvSqrt2, kI * kInvSqrt2); }
Vec2 l() { return make(kInvSqrt2, -kI * kInvSqrt2); }
}  // namespace kets

Vec4 kron(const Vec2& control, const Vec2& target) {
  Vec4 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out(2 * i + j) = control(i) * target(j);
  }
  return out;
}

Mat4 kron(const Mat2& control, const Mat2& target) {
  Mat4 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = control(i, j) * target;
    }
  }
  return out;
}

const std::array<Mat2, 4>& pauli1() {
  static const std::array<Mat2, 4> p = [] {
    std::array<Mat2, 4> out;
    out[0] = Mat2::Identity();
    out[1] << 0, 1, 1, 0;
    out[2] << 0, -kI, kI, 0;
    out[3] << 1, 0, 0, -1;
    return out;
  }();
  return p;
}

const std::array<Mat4, 16>& pauli2() {
  static const std::array<Mat4, 16> p = [] {
    std::array<Mat4, 16> out;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) out[4 * a + b] = kron(pauli1()[a], pauli1()[b]);
    }
    return out;
  }();
  return p;
}

const std::array<std::string, 16>& pauli2_labels() {
  static const std::array<std::string, 16> labels = [] {
    const char names[] = {'I', 'X', 'Y', 'Z'};
    std::array<std::string, 16> out;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) out[4 * a + b] = std::string{names[a], names[b]};
    }
    return out;
  }();
  return labels;
}

Mat4 cz_matrix() {
  Mat4 cz = Mat4::Identity();
  cz(3, 3) = -1.0;
  return cz;
}

Mat4 xx_matrix() { return kron(pauli1()[1], pauli1()[1]); }

std::string polarization_label(int index) {
  static const char* labels[] = {"VV", "VH", "HV", "HH"};
  if (index < 0 || index > 3) throw DomainError("basis index out of range");
  return labels[index];
}

std::string logical_label(int index) {
  static const char* labels[] = {"00", "01", "10", "11"};
  if (index < 0 || index > 3) throw DomainError("basis index out of range");
  return labels[index];
}

TwoQubitState::TwoQubitState(const Mat4& rho) : rho_(rho) {
  check_density(rho_, kStateTolerance, "TwoQubitState");
}

TwoQubitState TwoQubitState::pure(const Vec4& psi) {
  const double n = psi.squaredNorm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("zero state vector");
  return TwoQubitState(psi * psi.adjoint() / n);
}

TwoQubitState TwoQubitState::maximally_mixed() {
  return TwoQubitState(Mat4::Identity() / 4.0);
}

TwoQubitState TwoQubitState::normalized(const Mat4& unnormalized) {
  const double t = unnormalized.trace().real();
  if (!(t > 0.0)) throw DomainError("cannot normalize a zero-trace operator");
  Mat4 m = unnormalized / t;
  m = 0.5 * (m + m.adjoint()).eval();
  return TwoQubitState(m);
}

double TwoQubitState::purity() const { return (rho_ * rho_).trace().real(); }

ChiMatrix::ChiMatrix(const Mat16& chi) : chi_(chi) {
  check_density(chi_, kStateTolerance, "ChiMatrix");
}

ChiMatrix ChiMatrix::normalized(const Mat16& unnormalized) {
  const double t = unnormalized.trace().real();
  if (!(t > 0.0)) throw DomainError("cannot normalize a zero-trace chi matrix");
  Mat16 m = unnormalized / t;
  m = 0.5 * (m + m.adjoint()).eval();
  return ChiMatrix(m);
}

Vec16 pauli_coefficients(const Mat4& op) {
  Vec16 a;
  for (int m = 0; m < 16; ++m) a(m) = (pauli2()[m].adjoint() * op).trace() / 4.0;
  return a;
}

Mat16 chi_from_kraus(std::span<const Mat4> kraus) {
  Mat16 chi = Mat16::Zero();
  for (const auto& k : kraus) {
    const Vec16 a = pauli_coefficients(k);
    chi += a * a.adjoint();
  }
  return chi;
}

Mat4 apply_chi(const Mat16& chi, const Mat4& rho) {
  Mat4 out = Mat4::Zero();
  const auto& p = pauli2();
  for (int m = 0; m < 16; ++m) {
    const Mat4 left = p[m] * rho;
    for (int n = 0; n < 16; ++n) {
      if (chi(m, n) == cplx(0.0)) continue;
      out += chi(m, n) * left * p[n];
    }
  }
  return out;
}

Mat16 conjugate_chi(const Mat16& chi, const Mat4& pre, const Mat4& post) {
  // post P_m pre = sum_n C_nm P_n
  const auto& p = pauli2();
  Mat16 c;
  for (int m = 0; m < 16; ++m) {
    c.col(m) = pauli_coefficients(post * p[m] * pre);
  }
  return c * chi * c.adjoint();
}

Mat2 jones_to_logical(const Mat2& jones) {
  Mat2 out;
  out << jones(1, 1), jones(1, 0), jones(0, 1), jones(0, 0);
  return out;
}

bool is_unitary(const Mat2& u, double tol) {
  return (u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace ppbs
