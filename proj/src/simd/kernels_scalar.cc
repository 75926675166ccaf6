// Copyright 2026 The sarplan Authors
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

#include <cmath>
#include <cstddef>

#include "kernels_internal.hpp"

namespace sarplan::simd::internal {
namespace {

double sq_dist(const double* cols, std::size_t m, std::size_t dim,
               std::size_t j, const double* query) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = cols[d * m + j] - query[d];
    s += diff * diff;
  }
  return s;
}

void rbf_vector(const double* cols, std::size_t m, std::size_t dim,
                const double* query, double signal_variance,
                double inv_two_l2, double* out) {
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = signal_variance *
             std::exp(-inv_two_l2 * sq_dist(cols, m, dim, j, query));
  }
}

double rbf_weighted_sum_grad(const double* cols, std::size_t m,
                             std::size_t dim, const double* query,
                             double signal_variance, double inv_two_l2,
                             const double* weights, double* grad) {
  double sum = 0.0;
  for (std::size_t d = 0; d < dim; ++d) grad[d] = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double wk = weights[j] * signal_variance *
                      std::exp(-inv_two_l2 * sq_dist(cols, m, dim, j, query));
    sum += wk;
    for (std::size_t d = 0; d < dim; ++d) {
      grad[d] += wk * (cols[d * m + j] - query[d]);
    }
  }
  return sum;
}

double rbf_weighted_sum_grad_hess(const double* cols, std::size_t m,
                                  std::size_t dim, const double* query,
                                  double signal_variance, double inv_two_l2,
                                  const double* weights, double* grad,
                                  double* hess) {
  double sum = 0.0;
  for (std::size_t d = 0; d < dim; ++d) grad[d] = 0.0;
  for (std::size_t d = 0; d < dim * dim; ++d) hess[d] = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double wk = weights[j] * signal_variance *
                      std::exp(-inv_two_l2 * sq_dist(cols, m, dim, j, query));
    sum += wk;
    for (std::size_t a = 0; a < dim; ++a) {
      const double da = cols[a * m + j] - query[a];
      grad[a] += wk * da;
      for (std::size_t b = a; b < dim; ++b) {
        hess[a * dim + b] += wk * da * (cols[b * m + j] - query[b]);
      }
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < a; ++b) hess[a * dim + b] = hess[b * dim + a];
  }
  return sum;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void exp_nonpositive(const double* in, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = in[i] < -708.0 ? 0.0 : std::exp(in[i]);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &rbf_vector, &rbf_weighted_sum_grad,
                                 &rbf_weighted_sum_grad_hess, &dot, &exp_nonpositive};
  return table;
}

}  // namespace sarplan::simd::internal
