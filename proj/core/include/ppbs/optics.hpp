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

// Optical elements and circuits over labeled spatial paths.
//
// Beamsplitter convention (fixed throughout the library): a splitter with
// reflectivity eta acts on the ordered path pair (a, b) as
//
//     [ sqrt(eta)      sqrt(1 - eta) ]
//     [ sqrt(1 - eta)  -sqrt(eta)    ]
//
// so "reflected" light stays on its path label and picks up a sign on port b.
// A partially-polarizing splitter applies this block with its own eta for
// each polarization. Jones blocks are written in (H, V) order.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppbs/fock.hpp"

namespace ppbs {

enum class ElementKind { kPPBS, kBS, kHWP, kQWP, kLoss, kPhase };

/// Which input port of a two-port splitter a tracked path uses when the other
/// port is vacuum and the other output is discarded.
enum class Port { kA, kB };

struct Element {
  ElementKind kind = ElementKind::kBS;
  /// One or two spatial paths.
  std::vector<int> paths;
  /// PPBS: (eta_h, eta_v). BS: (eta). HWP/QWP: (theta). LOSS: (transmission).
  /// PHASE: (phi).
  std::vector<double> params;
  /// Only used by single-path splitters.
  Port port = Port::kA;

  /// Local block over (path, polarization) pairs, path-major with H before V.
  Eigen::MatrixXcd block() const;
  /// 2x2 Jones matrix of a single-path element in (H, V) order.
  Mat2 jones() const;
  std::string describe() const;
};

Element ppbs(int path_a, int path_b, double eta_h, double eta_v);
/// Single tracked path through a PPBS whose other input is empty and whose
/// other output is dropped: diag(+-sqrt(eta_h), +-sqrt(eta_v)), sign - on
/// port B.
Element ppbs_tap(int path, double eta_h, double eta_v, Port port = Port::kA);
Element beamsplitter(int path_a, int path_b, double eta);
/// Transmits H, fully exchanges V between the paths (ppbs with eta_h = 1,
/// eta_v = 0).
Element polarizing_beamsplitter(int path_a, int path_b);
/// Half-wave plate, block [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
Element hwp(int path, double theta);
/// Quarter-wave plate with fast axis at theta, R(theta) diag(1, i) R(-theta).
Element qwp(int path, double theta);
/// Polarization-independent amplitude sqrt(transmission).
Element loss(int path, double transmission);
Element phase(int path, double phi);

class Circuit {
 public:
  explicit Circuit(int path_count,
                   int internal_dimension = kDefaultInternalDimension);

  Circuit& add(Element element);

  int path_count() const { return path_count_; }
  int internal_dimension() const { return internal_dimension_; }
  const std::vector<Element>& elements() const { return elements_; }
  /// All (path, polarization, internal) modes in canonical order.
  std::vector<ModeLabel> modes() const;

 private:
  int path_count_;
  int internal_dimension_;
  std::vector<Element> elements_;
};

/// Ordered product of the element matrices, identity on internal indices.
/// Throws DomainError for an empty circuit or an out-of-range path.
TransferMatrix compile(const Circuit& circuit);

enum class WhichPhoton { kReference, kProbe };

/// Internal-state amplitudes realizing pairwise interference visibility V:
/// the reference photon sits in internal index 0, the probe in
/// sqrt(V)|0> + sqrt(1 - V)|1>.
std::vector<cplx> distinguishability_prepare(double visibility,
                                             WhichPhoton which);

/// Photon on `path` with Jones vector `polarization` (H, V order) and the
/// given internal amplitudes.
Photon make_photon(int path, const Vec2& polarization,
                   std::span<const cplx> internal);

struct WaveplateSetting {
  double hwp_angle = 0.0;
  double qwp_angle = 0.0;
  /// |<target|QWP HWP|H>|^2 at the returned angles.
  double fidelity = 0.0;
};

/// Angles of a HWP followed by a QWP that take |H> to `target` (H, V order),
/// found numerically.
WaveplateSetting fit_waveplates(const Vec2& target);

}  // namespace ppbs
