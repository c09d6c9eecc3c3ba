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

// Two-qubit linear algebra shared by every module: the polarization-qubit
// basis, Pauli operators, density matrices and process (chi) matrices.
//
// Qubit basis convention. Polarization encodes the logical value as
// V == |0> and H == |1>, so single-qubit vectors are ordered (V, H) and the
// two-qubit basis index is 2 * control + target:
//
//   index   0    1    2    3
//   logical 00   01   10   11
//   pol.    VV   VH   HV   HH
//
// Under this convention the controlled-Z gate is diag(1, 1, 1, -1), i.e. it
// flips the sign of the |HH> term.

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ppbs {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;
using Vec4 = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;

inline constexpr double kStateTolerance = 1e-10;

namespace kets {
Vec2 h();
Vec2 v();
/// (|H> + |V>)/sqrt(2)
Vec2 d();
/// (|H> - |V>)/sqrt(2)
Vec2 a();
/// (|H> + i|V>)/sqrt(2)
Vec2 r();
/// (|H> - i|V>)/sqrt(2)
Vec2 l();
}  // namespace kets

Vec4 kron(const Vec2& control, const Vec2& target);
Mat4 kron(const Mat2& control, const Mat2& target);

/// Single-qubit Paulis {I, X, Y, Z} in the logical basis.
const std::array<Mat2, 4>& pauli1();
/// Two-qubit Pauli basis, index 4 * a + b for P_a (control) x P_b (target).
const std::array<Mat4, 16>& pauli2();
/// "II", "IX", ..., "ZZ" in the same order as pauli2().
const std::array<std::string, 16>& pauli2_labels();

/// The logical controlled-Z, diag(1, 1, 1, -1).
Mat4 cz_matrix();
/// Swaps H and V on both qubits.
Mat4 xx_matrix();

/// Polarization label of a two-qubit basis index ("VV", "VH", "HV", "HH").
std::string polarization_label(int index);
/// Logical label of a two-qubit basis index ("00" ... "11").
std::string logical_label(int index);

/// Hermitian, positive semidefinite, unit-trace 4x4 density matrix.
class TwoQubitState {
 public:
  /// Validates Hermiticity, PSD and unit trace, each to kStateTolerance.
  explicit TwoQubitState(const Mat4& rho);

  /// |psi><psi| / <psi|psi>. Throws DomainError for the zero vector.
  static TwoQubitState pure(const Vec4& psi);
  static TwoQubitState maximally_mixed();
  /// Normalizes a nonzero PSD matrix to unit trace.
  static TwoQubitState normalized(const Mat4& unnormalized);

  const Mat4& matrix() const { return rho_; }
  double purity() const;

 private:
  Mat4 rho_;
};

/// 16x16 process matrix in the two-qubit Pauli basis,
/// E(rho) = sum_mn chi_mn P_m rho P_n^dagger, trace normalized to one.
class ChiMatrix {
 public:
  /// Validates Hermiticity, PSD (eigenvalue floor -1e-10) and unit trace.
  explicit ChiMatrix(const Mat16& chi);

  /// Normalizes a nonzero PSD matrix to unit trace.
  static ChiMatrix normalized(const Mat16& unnormalized);

  const Mat16& matrix() const { return chi_; }
  cplx operator()(int row, int col) const { return chi_(row, col); }

 private:
  Mat16 chi_;
};

/// Coefficients a_m of an operator in the Pauli basis, K = sum_m a_m P_m.
Vec16 pauli_coefficients(const Mat4& op);

/// Unnormalized chi of the map rho -> sum_k K_k rho K_k^dagger.
Mat16 chi_from_kraus(std::span<const Mat4> kraus);

/// Applies an (unnormalized) chi to a density operator.
Mat4 apply_chi(const Mat16& chi, const Mat4& rho);

/// chi' of the map rho -> post (E(pre rho pre^dagger)) post^dagger.
Mat16 conjugate_chi(const Mat16& chi, const Mat4& pre, const Mat4& post);

/// Converts a 2x2 Jones matrix written in (H, V) order to the logical (V, H)
/// qubit order.
Mat2 jones_to_logical(const Mat2& jones);

bool is_unitary(const Mat2& u, double tol = 1e-12);

}  // namespace ppbs
