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

#include "minimize.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

namespace ppbs::detail {
namespace {

struct GslVector {
  explicit GslVector(const std::vector<double>& x) : v(gsl_vector_alloc(x.size())) {
    for (std::size_t i = 0; i < x.size(); ++i) gsl_vector_set(v, i, x[i]);
  }
  ~GslVector() { gsl_vector_free(v); }
  GslVector(const GslVector&) = delete;
  GslVector& operator=(const GslVector&) = delete;
  gsl_vector* v;
};

std::span<const double> view(const gsl_vector* v) {
  return {v->data, v->size};
}

std::vector<double> copy(const gsl_vector* v) {
  return std::vector<double>(v->data, v->data + v->size);
}

// GSL aborts on errors by default; we inspect status codes instead.
void quiet_gsl() {
  static const bool done = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)done;
}

double call_f(const gsl_vector* x, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  const double value = f(view(x));
  return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

struct FdfContext {
  const ObjectiveWithGradient* f;
  std::vector<double> scratch;
};

double fdf_f(const gsl_vector* x, void* params) {
  auto* ctx = static_cast<FdfContext*>(params);
  ctx->scratch.assign(x->size, 0.0);
  const double value = (*ctx->f)(view(x), ctx->scratch);
  return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

void fdf_df(const gsl_vector* x, void* params, gsl_vector* g) {
  auto* ctx = static_cast<FdfContext*>(params);
  std::span<double> grad(g->data, g->size);
  (*ctx->f)(view(x), grad);
}

void fdf_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g) {
  auto* ctx = static_cast<FdfContext*>(params);
  std::span<double> grad(g->data, g->size);
  const double value = (*ctx->f)(view(x), grad);
  *f = std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

}  // namespace

MinimizeResult minimize_simplex(const Objective& f, std::vector<double> x0,
                                double initial_step, int max_iterations,
                                double size_tol) {
  quiet_gsl();
  const std::size_t n = x0.size();
  GslVector x(x0);
  GslVector step(std::vector<double>(n, initial_step));

  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &call_f;
  fn.params = const_cast<Objective*>(&f);

  gsl_multimin_fminimizer* s =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x.v, step.v);

  MinimizeResult result;
  result.history.push_back(s->fval);
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    result.history.push_back(s->fval);
    const double size = gsl_multimin_fminimizer_size(s);
    if (gsl_multimin_test_size(size, size_tol) == GSL_SUCCESS) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.x = copy(s->x);
  result.value = s->fval;
  result.iterations = iter;
  gsl_multimin_fminimizer_free(s);
  return result;
}

MinimizeResult minimize_bfgs(const ObjectiveWithGradient& f,
                             std::vector<double> x0, int max_iterations,
                             double gradient_tol) {
  quiet_gsl();
  const std::size_t n = x0.size();
  GslVector x(x0);
  FdfContext ctx{&f, {}};

  gsl_multimin_function_fdf fn;
  fn.n = n;
  fn.f = &fdf_f;
  fn.df = &fdf_df;
  fn.fdf = &fdf_fdf;
  fn.params = &ctx;

  gsl_multimin_fdfminimizer* s =
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_fdfminimizer_set(s, &fn, x.v, 1e-2, 0.1);

  MinimizeResult result;
  result.history.push_back(s->f);
  result.x = copy(s->x);
  result.value = s->f;
  int iter = 0;
  if (gsl_multimin_test_gradient(s->gradient, gradient_tol) == GSL_SUCCESS) {
    result.converged = true;
  } else {
    for (; iter < max_iterations; ++iter) {
      if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
      if (!(s->f <= result.value)) break;
      result.history.push_back(s->f);
      result.x = copy(s->x);
      result.value = s->f;
      if (gsl_multimin_test_gradient(s->gradient, gradient_tol) == GSL_SUCCESS) {
        result.converged = true;
        ++iter;
        break;
      }
    }
  }
  result.iterations = iter;
  gsl_multimin_fdfminimizer_free(s);
  return result;
}

}  // namespace ppbs::detail
