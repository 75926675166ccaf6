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

#ifndef SARPLAN_SRC_SIMD_KERNELS_INTERNAL_HPP_
#define SARPLAN_SRC_SIMD_KERNELS_INTERNAL_HPP_

#include "sarplan/simd/kernels.hpp"

namespace sarplan::simd::internal {

const KernelTable& scalar_table();
#if defined(SARPLAN_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace sarplan::simd::internal

#endif  // SARPLAN_SRC_SIMD_KERNELS_INTERNAL_HPP_
