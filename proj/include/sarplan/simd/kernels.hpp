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

#ifndef SARPLAN_SIMD_KERNELS_HPP_
#define SARPLAN_SIMD_KERNELS_HPP_

// Data-parallel inner loops of the GP: RBF kernel vectors, the fused
// mean/gradient reduction, and dot products. Training inputs are passed
// column-major: column d of an m x dim block starts at cols + d * m.
//
// Every kernel has a portable scalar reference. Wider variants are selected
// once at startup from what the CPU reports; SARPLAN_SIMD=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <string_view>

namespace sarplan::simd {

// Largest input dimension handled by the vector variants; wider inputs fall
// back to the scalar path.
inline constexpr std::size_t kMaxVectorDim = 8;
inline constexpr std::size_t kMaxVectorHessDim = 4;

struct KernelTable {
  std::string_view name;

  // out[j] = signal_variance * exp(-inv_two_l2 * |query - x_j|^2)
  void (*rbf_vector)(const double* cols, std::size_t m, std::size_t dim,
                     const double* query, double signal_variance,
                     double inv_two_l2, double* out);

  // Returns sum_j w_j k_j and writes grad[d] = sum_j w_j k_j (x_jd - query_d)
  // where k_j is the kernel value above.
  double (*rbf_weighted_sum_grad)(const double* cols, std::size_t m,
                                  std::size_t dim, const double* query,
                                  double signal_variance, double inv_two_l2,
                                  const double* weights, double* grad);

  // As above, and also hess[a * dim + b] = sum_j w_j k_j (x_ja - query_a)
  // (x_jb - query_b), written in full.
  double (*rbf_weighted_sum_grad_hess)(const double* cols, std::size_t m,
                                       std::size_t dim, const double* query,
                                       double signal_variance,
                                       double inv_two_l2,
                                       const double* weights, double* grad,
                                       double* hess);

  double (*dot)(const double* a, const double* b, std::size_t n);

  // out[i] = exp(in[i]) for in[i] <= 0; inputs below -708 map to 0.
  void (*exp_nonpositive)(const double* in, std::size_t n, double* out);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

// The table chosen at startup.
const KernelTable& active_kernels();

}  // namespace sarplan::simd

#endif  // SARPLAN_SIMD_KERNELS_HPP_
