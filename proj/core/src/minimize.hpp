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

// Thin wrappers around the GSL multimin minimizers.

#include <functional>
#include <span>
#include <vector>

namespace ppbs::detail {

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective at the start point and after every iteration.
  std::vector<double> history;
};

using Objective = std::function<double(std::span<const double>)>;
/// Returns f(x) and writes the gradient into `grad`.
using ObjectiveWithGradient =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Nelder-Mead (nmsimplex2) until the simplex size drops below `size_tol`.
MinimizeResult minimize_simplex(const Objective& f, std::vector<double> x0,
                                double initial_step, int max_iterations,
                                double size_tol);

/// BFGS (vector_bfgs2) until |grad| < `gradient_tol`. The line search only
/// accepts decreasing steps, so `history` is non-increasing.
MinimizeResult minimize_bfgs(const ObjectiveWithGradient& f,
                             std::vector<double> x0, int max_iterations,
                             double gradient_tol);

}  // namespace ppbs::detail
