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

#include "ppbs/fock.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace ppbs {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// prod over distinct entries of (multiplicity)!
template <typename T>
double multiplicity_factorials(const std::vector<T>& sorted) {
  double f = 1.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    f *= factorial(static_cast<int>(j - i));
    i = j;
  }
  return f;
}

double norm2_of(const std::map<Occupation, cplx>& terms) {
  double n = 0.0;
  for (const auto& [_, amp] : terms) n += std::norm(amp);
  return n;
}

std::map<ModeLabel, int> build_lookup(const std::vector<ModeLabel>& modes,
                                      const char* what) {
  std::map<ModeLabel, int> lookup;
  for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
    if (!lookup.emplace(modes[i], i).second) {
      throw DomainError(std::string("TransferMatrix: duplicate ") + what + " mode");
    }
  }
  return lookup;
}

// Calls `visit` with every non-decreasing index sequence of length k drawn
// from `pool`.
template <typename Visit>
void for_each_multiset(const std::vector<int>& pool, int k, std::vector<int>& current,
                       std::size_t start, Visit&& visit) {
  if (static_cast<int>(current.size()) == k) {
    visit(current);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    for_each_multiset(pool, k, current, i, visit);
    current.pop_back();
  }
}

}  // namespace

PhotonicState::PhotonicState(std::map<Occupation, cplx> terms, int photon_number)
    : terms_(std::move(terms)), photon_number_(photon_number) {}

PhotonicState PhotonicState::from_terms(const std::map<Occupation, cplx>& terms) {
  if (terms.empty()) throw DomainError("PhotonicState: no terms");
  std::map<Occupation, cplx> canonical;
  int n = -1;
  for (const auto& [occ, amp] : terms) {
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) {
      throw DomainError("PhotonicState: non-finite amplitude");
    }
    if (n < 0) n = static_cast<int>(occ.size());
    if (static_cast<int>(occ.size()) != n) {
      throw DomainError("PhotonicState: terms with different photon numbers");
    }
    Occupation sorted = occ;
    std::sort(sorted.begin(), sorted.end());
    if (!canonical.emplace(std::move(sorted), amp).second) {
      throw DomainError("PhotonicState: duplicate occupation");
    }
  }
  if (n < 1 || n > kMaxPhotonNumber) {
    throw DomainError("PhotonicState: photon number must be in [1, 4]");
  }
  const double norm = norm2_of(canonical);
  if (!(norm > 0.0) || norm > 1.0 + 1e-12) {
    throw DomainError("PhotonicState: squared norm must lie in (0, 1]");
  }
  return PhotonicState(std::move(canonical), n);
}

PhotonicState PhotonicState::from_photons(std::span<const Photon> photons) {
  const int n = static_cast<int>(photons.size());
  if (n < 1 || n > kMaxPhotonNumber) {
    throw DomainError("from_photons: photon number must be in [1, 4]");
  }
  // Sum over all assignments of one mode per photon; a_m1^+ ... a_mn^+ |0>
  // equals sqrt(prod n_m!) times the normalized Fock state.
  std::map<Occupation, cplx> raw;
  Occupation current;
  cplx weight = 1.0;
  auto recurse = [&](auto&& self, int k) -> void {
    if (k == n) {
      Occupation sorted = current;
      std::sort(sorted.begin(), sorted.end());
      raw[sorted] += weight;
      return;
    }
    for (const auto& [mode, amp] : photons[k].amplitudes) {
      if (amp == cplx(0.0)) continue;
      const cplx saved = weight;
      current.push_back(mode);
      weight *= amp;
      self(self, k + 1);
      weight = saved;
      current.pop_back();
    }
  };
  recurse(recurse, 0);

  std::map<Occupation, cplx> terms;
  for (auto& [occ, amp] : raw) {
    amp *= std::sqrt(multiplicity_factorials(occ));
    if (std::abs(amp) > kPruneThreshold) terms.emplace(occ, amp);
  }
  const double norm = norm2_of(terms);
  if (!(norm > 0.0)) throw DomainError("from_photons: state vanishes");
  for (auto& [_, amp] : terms) amp /= std::sqrt(norm);
  return PhotonicState(std::move(terms), n);
}

PhotonicState PhotonicState::superpose(
    std::span<const std::pair<cplx, PhotonicState>> parts) {
  if (parts.empty()) throw DomainError("superpose: no parts");
  const int n = parts.front().second.photon_number();
  std::map<Occupation, cplx> terms;
  for (const auto& [coeff, state] : parts) {
    if (state.photon_number() != n) {
      throw DomainError("superpose: photon numbers differ");
    }
    for (const auto& [occ, amp] : state.terms()) terms[occ] += coeff * amp;
  }
  std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) <= kPruneThreshold; });
  const double norm = norm2_of(terms);
  if (!(norm > 0.0)) throw DomainError("superpose: state vanishes");
  for (auto& [_, amp] : terms) amp /= std::sqrt(norm);
  return PhotonicState(std::move(terms), n);
}

cplx PhotonicState::amplitude(const Occupation& occupation) const {
  Occupation sorted = occupation;
  std::sort(sorted.begin(), sorted.end());
  const auto it = terms_.find(sorted);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

double PhotonicState::norm2() const { return norm2_of(terms_); }

PhotonicState PhotonicState::normalized() const {
  const double s = std::sqrt(norm2());
  auto terms = terms_;
  for (auto& [_, amp] : terms) amp /= s;
  return PhotonicState(std::move(terms), photon_number_);
}

TransferMatrix::TransferMatrix(Eigen::MatrixXcd entries,
                               std::vector<ModeLabel> output_modes,
                               std::vector<ModeLabel> input_modes)
    : entries_(std::move(entries)),
      output_modes_(std::move(output_modes)),
      input_modes_(std::move(input_modes)) {
  if (entries_.rows() != static_cast<Eigen::Index>(output_modes_.size()) ||
      entries_.cols() != static_cast<Eigen::Index>(input_modes_.size())) {
    throw DomainError("TransferMatrix: dimension mismatch with mode maps");
  }
  if (!entries_.allFinite()) throw DomainError("TransferMatrix: non-finite entry");
  input_lookup_ = build_lookup(input_modes_, "input");
  output_lookup_ = build_lookup(output_modes_, "output");
  if (entries_.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(entries_);
    if (svd.singularValues().maxCoeff() > 1.0 + 1e-12) {
      throw DomainError("TransferMatrix: singular value above one (gain)");
    }
  }
}

TransferMatrix TransferMatrix::identity(std::vector<ModeLabel> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return TransferMatrix(Eigen::MatrixXcd::Identity(n, n), modes, modes);
}

std::optional<int> TransferMatrix::input_index(const ModeLabel& mode) const {
  const auto it = input_lookup_.find(mode);
  if (it == input_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TransferMatrix::output_index(const ModeLabel& mode) const {
  const auto it = output_lookup_.find(mode);
  if (it == output_lookup_.end()) return std::nullopt;
  return it->second;
}

TransferMatrix TransferMatrix::then(const TransferMatrix& next) const {
  return next * *this;
}

TransferMatrix operator*(const TransferMatrix& second, const TransferMatrix& first) {
  if (second.input_modes() != first.output_modes()) {
    throw DomainError("TransferMatrix composition: mode maps do not line up");
  }
  return TransferMatrix(second.entries() * first.entries(), second.output_modes(),
                        first.input_modes());
}

PhotonicState evolve(const PhotonicState& state, const TransferMatrix& m) {
  const Eigen::MatrixXcd& u = m.entries();
  const int n = state.photon_number();
  std::map<Occupation, cplx> out;

  for (const auto& [occ, amp] : state.terms()) {
    std::vector<int> cols;
    cols.reserve(occ.size());
    for (const auto& mode : occ) {
      const auto idx = m.input_index(mode);
      if (!idx) throw DomainError("evolve: occupied mode missing from transfer matrix");
      cols.push_back(*idx);
    }
    std::sort(cols.begin(), cols.end());
    const double in_fact = multiplicity_factorials(cols);

    std::vector<int> reachable;
    for (int r = 0; r < u.rows(); ++r) {
      for (int c : cols) {
        if (u(r, c) != cplx(0.0)) {
          reachable.push_back(r);
          break;
        }
      }
    }

    Eigen::MatrixXcd sub(n, n);
    std::vector<int> rows;
    for_each_multiset(reachable, n, rows, 0, [&](const std::vector<int>& out_rows) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sub(i, j) = u(out_rows[i], cols[j]);
      }
      const cplx p = permanent(sub);
      if (p == cplx(0.0)) return;
      const double out_fact = multiplicity_factorials(out_rows);
      Occupation key;
      key.reserve(n);
      for (int r : out_rows) key.push_back(m.output_modes()[r]);
      std::sort(key.begin(), key.end());
      out[key] += amp * p / std::sqrt(in_fact * out_fact);
    });
  }

  std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  if (out.empty()) throw PhotonsLost("evolve: all photons lost");
  return PhotonicState::from_terms(out);
}

bool SpatialPattern::matches(const Occupation& occupation) const {
  for (const auto& [path, want] : photons_per_path) {
    const auto got = std::count_if(occupation.begin(), occupation.end(),
                                   [p = path](const ModeLabel& m) { return m.spatial == p; });
    if (got != want) return false;
  }
  return true;
}

SpatialPattern coincidence(std::initializer_list<int> paths) {
  SpatialPattern p;
  for (int path : paths) p.photons_per_path[path] = 1;
  return p;
}

PostselectResult postselect(const PhotonicState& state, const SpatialPattern& pattern) {
  // a path left empty by interference is a legitimate null outcome, so only
  // a pattern that touches none of the occupied paths is rejected
  bool touches = pattern.photons_per_path.empty();
  for (const auto& [path, want] : pattern.photons_per_path) {
    if (want < 0) throw DomainError("postselect: negative photon count in pattern");
    for (const auto& [occ, _] : state.terms()) {
      for (const auto& mode : occ) touches = touches || mode.spatial == path;
    }
  }
  if (!touches) throw DomainError("postselect: pattern names no path occupied in the state");

  std::map<Occupation, cplx> kept;
  for (const auto& [occ, amp] : state.terms()) {
    if (pattern.matches(occ)) kept.emplace(occ, amp);
  }
  PostselectResult result;
  result.success_probability = norm2_of(kept);
  if (kept.empty() || !(result.success_probability > 0.0)) {
    result.success_probability = 0.0;
    return result;
  }
  const double s = std::sqrt(result.success_probability);
  for (auto& [_, amp] : kept) amp /= s;
  result.state = PhotonicState::from_terms(kept);
  return result;
}

QubitBranches qubit_branches(const PhotonicState& state, int control_path,
                             int target_path) {
  if (state.photon_number() != 2) {
    throw DomainError("qubit_branches: need exactly two photons");
  }
  QubitBranches branches;
  for (const auto& [occ, amp] : state.terms()) {
    const ModeLabel* c = nullptr;
    const ModeLabel* t = nullptr;
    for (const auto& mode : occ) {
      if (mode.spatial == control_path && c == nullptr) {
        c = &mode;
      } else if (mode.spatial == target_path && t == nullptr) {
        t = &mode;
      } else {
        throw DomainError("qubit_branches: bunched or off-path term; post-select first");
      }
    }
    if (c == nullptr || t == nullptr) {
      throw DomainError("qubit_branches: term without one photon per path");
    }
    const int bit_c = c->polarization == Polarization::H ? 1 : 0;
    const int bit_t = t->polarization == Polarization::H ? 1 : 0;
    auto [it, _] = branches.try_emplace({c->internal, t->internal}, Vec4::Zero());
    it->second(2 * bit_c + bit_t) += amp;
  }
  return branches;
}

TwoQubitState reduce_to_qubits(const PhotonicState& state, int control_path,
                               int target_path) {
  Mat4 rho = Mat4::Zero();
  for (const auto& [_, v] : qubit_branches(state, control_path, target_path)) {
    rho += v * v.adjoint();
  }
  return TwoQubitState::normalized(rho);
}

}  // namespace ppbs
