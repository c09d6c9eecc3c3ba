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

// Few-photon states over labeled optical modes and their evolution through
// linear-optical transfer matrices.
//
// A mode is (spatial path, polarization, internal index). The internal index
// carries the temporal/spectral wavepacket; photons that differ only there
// are distinguishable and do not interfere.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ppbs/errors.hpp"
#include "ppbs/qubits.hpp"

namespace ppbs {

enum class Polarization : std::uint8_t { H = 0, V = 1 };

inline constexpr int kDefaultInternalDimension = 2;
inline constexpr int kMaxPhotonNumber = 4;
/// Amplitudes below this magnitude are dropped after every evolution.
inline constexpr double kPruneThreshold = 1e-14;

struct ModeLabel {
  int spatial = 0;
  Polarization polarization = Polarization::H;
  int internal = 0;

  auto operator<=>(const ModeLabel&) const = default;
};

/// Sorted multiset of occupied modes, one entry per photon.
using Occupation = std::vector<ModeLabel>;

/// One photon's creation operator, sum_m c_m a_m^dagger.
struct Photon {
  std::vector<std::pair<ModeLabel, cplx>> amplitudes;
};

/// Sparse amplitude map over Fock basis states of fixed photon number.
///
/// Amplitudes are coefficients of normalized occupation-number states. The
/// squared norm is at most one; values below one only arise after lossy
/// evolution or post-selection bookkeeping.
class PhotonicState {
 public:
  /// Validates the invariants (equal photon number, canonical keys,
  /// 0 < norm^2 <= 1). Keys are sorted on the way in.
  static PhotonicState from_terms(const std::map<Occupation, cplx>& terms);

  /// Normalized product state a_1^dagger ... a_n^dagger |0>.
  static PhotonicState from_photons(std::span<const Photon> photons);

  /// Normalized linear combination of states with equal photon number.
  static PhotonicState superpose(
      std::span<const std::pair<cplx, PhotonicState>> parts);

  int photon_number() const { return photon_number_; }
  const std::map<Occupation, cplx>& terms() const { return terms_; }
  cplx amplitude(const Occupation& occupation) const;
  double norm2() const;
  PhotonicState normalized() const;

 private:
  PhotonicState(std::map<Occupation, cplx> terms, int photon_number);

  std::map<Occupation, cplx> terms_;
  int photon_number_ = 0;
};

/// Complex matrix from input modes (columns) to output modes (rows).
/// Sub-unitary matrices model leakage out of the tracked modes.
class TransferMatrix {
 public:
  /// Throws DomainError on dimension mismatch, duplicate mode labels or any
  /// singular value above 1 + 1e-12.
  TransferMatrix(Eigen::MatrixXcd entries, std::vector<ModeLabel> output_modes,
                 std::vector<ModeLabel> input_modes);

  static TransferMatrix identity(std::vector<ModeLabel> modes);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  const std::vector<ModeLabel>& output_modes() const { return output_modes_; }
  const std::vector<ModeLabel>& input_modes() const { return input_modes_; }
  std::optional<int> input_index(const ModeLabel& mode) const;
  std::optional<int> output_index(const ModeLabel& mode) const;

  /// `next` applied after `*this`; requires next's inputs to equal our
  /// outputs.
  TransferMatrix then(const TransferMatrix& next) const;

 private:
  Eigen::MatrixXcd entries_;
  std::vector<ModeLabel> output_modes_;
  std::vector<ModeLabel> input_modes_;
  std::map<ModeLabel, int> input_lookup_;
  std::map<ModeLabel, int> output_lookup_;
};

/// `second` applied after `first`, i.e. the matrix product second * first.
TransferMatrix operator*(const TransferMatrix& second,
                         const TransferMatrix& first);

/// Permanent via Ryser's formula with Gray-code ordering.
cplx permanent(const Eigen::MatrixXcd& m);

/// Second-quantized evolution: <out|U|in> = perm(U[out, in]) /
/// sqrt(prod n_in! prod n_out!). Throws PhotonsLost when nothing survives.
PhotonicState evolve(const PhotonicState& state, const TransferMatrix& m);

/// Exact photon counts required on listed spatial paths; unlisted paths are
/// unconstrained.
struct SpatialPattern {
  std::map<int, int> photons_per_path;

  bool matches(const Occupation& occupation) const;
};

/// Heralding on "exactly one photon in each of these paths".
SpatialPattern coincidence(std::initializer_list<int> paths);

struct PostselectResult {
  /// Renormalized surviving state; empty when nothing survived.
  std::optional<PhotonicState> state;
  /// Norm^2 of the kept terms before renormalization.
  double success_probability = 0.0;

  bool null() const { return !state.has_value(); }
};

/// Keeps the terms matching `pattern`. A pattern none of whose paths occurs
/// in any term is a DomainError; zero surviving amplitude, including a
/// listed path that no term occupies, is a null result.
PostselectResult postselect(const PhotonicState& state,
                            const SpatialPattern& pattern);

/// Coherent two-qubit amplitudes per internal configuration. Each key is
/// (control internal index, target internal index); the vectors are in the
/// qubit basis of qubits.hpp and are not normalized.
using QubitBranches = std::map<std::pair<int, int>, Vec4>;

/// Splits a state with exactly one photon on each of the two paths into
/// polarization-qubit amplitudes, keyed by the internal labels.
QubitBranches qubit_branches(const PhotonicState& state, int control_path,
                             int target_path);

/// Polarization density matrix of a one-photon-per-path state, tracing out
/// internal labels. Bunched or off-path terms are a DomainError.
TwoQubitState reduce_to_qubits(const PhotonicState& state, int control_path,
                               int target_path);

}  // namespace ppbs
