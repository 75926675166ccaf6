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

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernels_internal.hpp"

namespace sarplan::simd::internal {
namespace {

// Cephes-style exp: range reduction by ln2 split in two parts, then a
// (3,4) Pade form on the remainder. Lanes below -708 are returned as 0.
inline __m256d exp_pd(__m256d x) {
  const __m256d kLow = _mm256_set1_pd(-708.0);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kC1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878E-4);
  const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300E-2);
  const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910E-1);
  const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042E-6);
  const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192E-3);
  const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766E-1);
  const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000009E0);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kTwo = _mm256_set1_pd(2.0);

  const __m256d underflow = _mm256_cmp_pd(x, kLow, _CMP_LT_OQ);
  x = _mm256_max_pd(x, kLow);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, kLog2e),
                                     _MM_FROUND_TO_NEAREST_INT |
                                         _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, kC1, x);
  x = _mm256_fnmadd_pd(fx, kC2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(kP0, xx, kP1);
  px = _mm256_fmadd_pd(px, xx, kP2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(kQ0, xx, kQ1);
  qx = _mm256_fmadd_pd(qx, xx, kQ2);
  qx = _mm256_fmadd_pd(qx, xx, kQ3);
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(kTwo, r, kOne);

  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
  return _mm256_andnot_pd(underflow, r);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d sq_dist4(const double* cols, std::size_t m, std::size_t dim,
                        std::size_t j, const double* query) {
  __m256d s = _mm256_setzero_pd();
  for (std::size_t d = 0; d < dim; ++d) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols + d * m + j),
                                       _mm256_set1_pd(query[d]));
    s = _mm256_fmadd_pd(diff, diff, s);
  }
  return s;
}

inline double sq_dist1(const double* cols, std::size_t m, std::size_t dim,
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
  const __m256d neg_scale = _mm256_set1_pd(-inv_two_l2);
  const __m256d sf2 = _mm256_set1_pd(signal_variance);
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d e =
        exp_pd(_mm256_mul_pd(neg_scale, sq_dist4(cols, m, dim, j, query)));
    _mm256_storeu_pd(out + j, _mm256_mul_pd(sf2, e));
  }
  for (; j < m; ++j) {
    out[j] = signal_variance *
             std::exp(-inv_two_l2 * sq_dist1(cols, m, dim, j, query));
  }
}

double rbf_weighted_sum_grad(const double* cols, std::size_t m,
                             std::size_t dim, const double* query,
                             double signal_variance, double inv_two_l2,
                             const double* weights, double* grad) {
  if (dim > kMaxVectorDim) {
    return scalar_table().rbf_weighted_sum_grad(
        cols, m, dim, query, signal_variance, inv_two_l2, weights, grad);
  }
  const __m256d neg_scale = _mm256_set1_pd(-inv_two_l2);
  const __m256d sf2 = _mm256_set1_pd(signal_variance);
  __m256d acc_grad[kMaxVectorDim];
  __m256d q[kMaxVectorDim];
  for (std::size_t d = 0; d < dim; ++d) {
    acc_grad[d] = _mm256_setzero_pd();
    q[d] = _mm256_set1_pd(query[d]);
  }
  __m256d acc_sum = _mm256_setzero_pd();

  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    __m256d diff[kMaxVectorDim];
    __m256d s = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dim; ++d) {
      diff[d] = _mm256_sub_pd(_mm256_loadu_pd(cols + d * m + j), q[d]);
      s = _mm256_fmadd_pd(diff[d], diff[d], s);
    }
    const __m256d wk = _mm256_mul_pd(
        _mm256_mul_pd(_mm256_loadu_pd(weights + j), sf2),
        exp_pd(_mm256_mul_pd(neg_scale, s)));
    acc_sum = _mm256_add_pd(acc_sum, wk);
    for (std::size_t d = 0; d < dim; ++d) {
      acc_grad[d] = _mm256_fmadd_pd(wk, diff[d], acc_grad[d]);
    }
  }

  double sum = hsum(acc_sum);
  for (std::size_t d = 0; d < dim; ++d) grad[d] = hsum(acc_grad[d]);
  for (; j < m; ++j) {
    const double wk = weights[j] * signal_variance *
                      std::exp(-inv_two_l2 * sq_dist1(cols, m, dim, j, query));
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
  if (dim > kMaxVectorHessDim) {
    return scalar_table().rbf_weighted_sum_grad_hess(
        cols, m, dim, query, signal_variance, inv_two_l2, weights, grad, hess);
  }
  const __m256d neg_scale = _mm256_set1_pd(-inv_two_l2);
  const __m256d sf2 = _mm256_set1_pd(signal_variance);
  __m256d acc_grad[kMaxVectorHessDim];
  __m256d acc_hess[kMaxVectorHessDim * kMaxVectorHessDim];
  __m256d q[kMaxVectorHessDim];
  for (std::size_t d = 0; d < dim; ++d) {
    acc_grad[d] = _mm256_setzero_pd();
    q[d] = _mm256_set1_pd(query[d]);
  }
  for (std::size_t d = 0; d < dim * dim; ++d) acc_hess[d] = _mm256_setzero_pd();
  __m256d acc_sum = _mm256_setzero_pd();

  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    __m256d diff[kMaxVectorHessDim];
    __m256d s = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dim; ++d) {
      diff[d] = _mm256_sub_pd(_mm256_loadu_pd(cols + d * m + j), q[d]);
      s = _mm256_fmadd_pd(diff[d], diff[d], s);
    }
    const __m256d wk = _mm256_mul_pd(
        _mm256_mul_pd(_mm256_loadu_pd(weights + j), sf2),
        exp_pd(_mm256_mul_pd(neg_scale, s)));
    acc_sum = _mm256_add_pd(acc_sum, wk);
    for (std::size_t a = 0; a < dim; ++a) {
      const __m256d wd = _mm256_mul_pd(wk, diff[a]);
      acc_grad[a] = _mm256_add_pd(acc_grad[a], wd);
      for (std::size_t b = a; b < dim; ++b) {
        acc_hess[a * dim + b] = _mm256_fmadd_pd(wd, diff[b], acc_hess[a * dim + b]);
      }
    }
  }

  double sum = hsum(acc_sum);
  for (std::size_t a = 0; a < dim; ++a) {
    grad[a] = hsum(acc_grad[a]);
    for (std::size_t b = a; b < dim; ++b) hess[a * dim + b] = hsum(acc_hess[a * dim + b]);
  }
  for (; j < m; ++j) {
    const double wk = weights[j] * signal_variance *
                      std::exp(-inv_two_l2 * sq_dist1(cols, m, dim, j, query));
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
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void exp_nonpositive(const double* in, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(in + i)));
  }
  for (; i < n; ++i) out[i] = in[i] < -708.0 ? 0.0 : std::exp(in[i]);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &rbf_vector, &rbf_weighted_sum_grad,
                                 &rbf_weighted_sum_grad_hess, &dot, &exp_nonpositive};
  return table;
}

}  // namespace sarplan::simd::internal
