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

#include "ppbs/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "minimize.hpp"

namespace ppbs {
namespace {

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

void check_paths(int a, int b) {
  if (a < 0 || b < 0) throw DomainError("path indices must be non-negative");
  if (a == b) throw DomainError("a two-path element needs distinct paths");
}

Mat2 splitter_block(double eta) {
  const double r = std::sqrt(eta);
  const double t = std::sqrt(1.0 - eta);
  Mat2 m;
  m << r, t, t, -r;
  return m;
}

}  // namespace

Eigen::MatrixXcd Element::block() const {
  if (paths.size() == 2) {
    const double eta_h = params.at(0);
    const double eta_v = kind == ElementKind::kBS ? params.at(0) : params.at(1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    for (int pol = 0; pol < 2; ++pol) {
      const Mat2 b = splitter_block(pol == 0 ? eta_h : eta_v);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) m(2 * i + pol, 2 * j + pol) = b(i, j);
      }
    }
    return m;
  }
  return jones();
}

Mat2 Element::jones() const {
  if (paths.size() != 1) throw DomainError("jones() needs a single-path element");
  Mat2 j = Mat2::Zero();
  switch (kind) {
    case ElementKind::kPPBS:
    case ElementKind::kBS: {
      const double sign = port == Port::kA ? 1.0 : -1.0;
      const double eta_h = params.at(0);
      const double eta_v = kind == ElementKind::kBS ? params.at(0) : params.at(1);
      j(0, 0) = sign * std::sqrt(eta_h);
      j(1, 1) = sign * std::sqrt(eta_v);
      break;
    }
    case ElementKind::kHWP: {
      const double c = std::cos(2.0 * params.at(0));
      const double s = std::sin(2.0 * params.at(0));
      j << c, s, s, -c;
      break;
    }
    case ElementKind::kQWP: {
      const double c = std::cos(params.at(0));
      const double s = std::sin(params.at(0));
      Mat2 rot, rot_inv, retard;
      rot << c, -s, s, c;
      rot_inv << c, s, -s, c;
      retard << 1.0, 0.0, 0.0, cplx(0.0, 1.0);
      j = rot * retard * rot_inv;
      break;
    }
    case ElementKind::kLoss:
      j = Mat2::Identity() * std::sqrt(params.at(0));
      break;
    case ElementKind::kPhase:
      j = Mat2::Identity() * std::polar(1.0, params.at(0));
      break;
  }
  return j;
}

std::string Element::describe() const {
  static const char* names[] = {"PPBS", "BS", "HWP", "QWP", "LOSS", "PHASE"};
  std::ostringstream os;
  os << names[static_cast<int>(kind)] << "(";
  for (std::size_t i = 0; i < paths.size(); ++i) os << (i ? "," : "") << paths[i];
  os << ";";
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  if (paths.size() == 1 && (kind == ElementKind::kPPBS || kind == ElementKind::kBS)) {
    os << (port == Port::kA ? ";A" : ";B");
  }
  os << ")";
  return os.str();
}

Element ppbs(int path_a, int path_b, double eta_h, double eta_v) {
  check_paths(path_a, path_b);
  check_unit_interval(eta_h, "PPBS eta_h");
  check_unit_interval(eta_v, "PPBS eta_v");
  return Element{ElementKind::kPPBS, {path_a, path_b}, {eta_h, eta_v}};
}

Element ppbs_tap(int path, double eta_h, double eta_v, Port port) {
  if (path < 0) throw DomainError("path indices must be non-negative");
  check_unit_interval(eta_h, "PPBS eta_h");
  check_unit_interval(eta_v, "PPBS eta_v");
  return Element{ElementKind::kPPBS, {path}, {eta_h, eta_v}, port};
}

Element beamsplitter(int path_a, int path_b, double eta) {
  check_paths(path_a, path_b);
  check_unit_interval(eta, "beamsplitter eta");
  return Element{ElementKind::kBS, {path_a, path_b}, {eta}};
}

Element polarizing_beamsplitter(int path_a, int path_b) {
  return ppbs(path_a, path_b, 1.0, 0.0);
}

Element hwp(int path, double theta) {
  if (path < 0) throw DomainError("path indices must be non-negative");
  check_finite(theta, "HWP angle");
  return Element{ElementKind::kHWP, {path}, {theta}};
}

Element qwp(int path, double theta) {
  if (path < 0) throw DomainError("path indices must be non-negative");
  check_finite(theta, "QWP angle");
  return Element{ElementKind::kQWP, {path}, {theta}};
}

Element loss(int path, double transmission) {
  if (path < 0) throw DomainError("path indices must be non-negative");
  check_unit_interval(transmission, "loss transmission");
  return Element{ElementKind::kLoss, {path}, {transmission}};
}

Element phase(int path, double phi) {
  if (path < 0) throw DomainError("path indices must be non-negative");
  check_finite(phi, "phase");
  return Element{ElementKind::kPhase, {path}, {phi}};
}

Circuit::Circuit(int path_count, int internal_dimension)
    : path_count_(path_count), internal_dimension_(internal_dimension) {
  if (path_count < 1) throw DomainError("Circuit: need at least one path");
  if (internal_dimension < 1) throw DomainError("Circuit: internal dimension must be >= 1");
}

Circuit& Circuit::add(Element element) {
  elements_.push_back(std::move(element));
  return *this;
}

std::vector<ModeLabel> Circuit::modes() const {
  std::vector<ModeLabel> out;
  out.reserve(static_cast<std::size_t>(path_count_) * 2 * internal_dimension_);
  for (int p = 0; p < path_count_; ++p) {
    for (auto pol : {Polarization::H, Polarization::V}) {
      for (int k = 0; k < internal_dimension_; ++k) out.push_back({p, pol, k});
    }
  }
  return out;
}

TransferMatrix compile(const Circuit& circuit) {
  if (circuit.elements().empty()) throw DomainError("compile: empty circuit");
  const int dim_internal = circuit.internal_dimension();
  const int n = circuit.path_count() * 2 * dim_internal;
  auto global = [&](int path, int pol, int k) { return (path * 2 + pol) * dim_internal + k; };

  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& e : circuit.elements()) {
    for (int p : e.paths) {
      if (p < 0 || p >= circuit.path_count()) {
        throw DomainError("compile: element " + e.describe() + " uses a path out of range");
      }
    }
    const Eigen::MatrixXcd local = e.block();
    const int slots = static_cast<int>(e.paths.size());
    Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < dim_internal; ++k) {
      for (int si = 0; si < slots; ++si) {
        for (int pi = 0; pi < 2; ++pi) {
          step(global(e.paths[si], pi, k), global(e.paths[si], pi, k)) = 0.0;
        }
      }
      for (int si = 0; si < slots; ++si) {
        for (int pi = 0; pi < 2; ++pi) {
          for (int sj = 0; sj < slots; ++sj) {
            for (int pj = 0; pj < 2; ++pj) {
              step(global(e.paths[si], pi, k), global(e.paths[sj], pj, k)) =
                  local(2 * si + pi, 2 * sj + pj);
            }
          }
        }
      }
    }
    total = step * total;
  }
  const auto modes = circuit.modes();
  return TransferMatrix(std::move(total), modes, modes);
}

std::vector<cplx> distinguishability_prepare(double visibility, WhichPhoton which) {
  check_unit_interval(visibility, "overlap V");
  if (which == WhichPhoton::kReference) return {1.0, 0.0};
  return {std::sqrt(visibility), std::sqrt(1.0 - visibility)};
}

Photon make_photon(int path, const Vec2& polarization, std::span<const cplx> internal) {
  Photon photon;
  for (int pol = 0; pol < 2; ++pol) {
    for (int k = 0; k < static_cast<int>(internal.size()); ++k) {
      const cplx amp = polarization(pol) * internal[k];
      if (amp == cplx(0.0)) continue;
      photon.amplitudes.push_back(
          {{path, pol == 0 ? Polarization::H : Polarization::V, k}, amp});
    }
  }
  return photon;
}

WaveplateSetting fit_waveplates(const Vec2& target) {
  const double norm = target.norm();
  if (!(norm > 0.0)) throw DomainError("fit_waveplates: zero target");
  const Vec2 goal = target / norm;
  const Vec2 h_in(1.0, 0.0);
  auto fidelity = [&](double h, double q) {
    const Vec2 out = qwp(0, q).jones() * hwp(0, h).jones() * h_in;
    return std::norm(goal.dot(out));
  };
  const detail::Objective objective = [&](std::span<const double> x) {
    return 1.0 - fidelity(x[0], x[1]);
  };

  WaveplateSetting best;
  best.fidelity = -1.0;
  constexpr int kGrid = 6;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double h0 = std::numbers::pi * i / kGrid;
      const double q0 = std::numbers::pi * j / kGrid;
      auto r = detail::minimize_simplex(objective, {h0, q0}, 0.2, 2000, 1e-12);
      const double f = 1.0 - r.value;
      if (f > best.fidelity) {
        best = {r.x[0], r.x[1], f};
      }
    }
  }
  return best;
}

}  // namespace ppbs
