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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sarplan/simd/kernels.hpp"

namespace sarplan::simd {
namespace {

struct Problem {
  std::size_t m;
  std::size_t dim;
  std::vector<double> cols;
  std::vector<double> query;
  std::vector<double> weights;
};

Problem random_problem(std::mt19937_64& rng, std::size_t m, std::size_t dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Problem p{m, dim, std::vector<double>(m * dim), std::vector<double>(dim),
            std::vector<double>(m)};
  for (double& v : p.cols) v = u(rng);
  for (double& v : p.query) v = u(rng);
  for (double& v : p.weights) v = u(rng);
  return p;
}

// Direct evaluation from the kernel definition.
double reference_kernel(const Problem& p, std::size_t j, double sf2,
                        double inv_two_l2) {
  double s = 0.0;
  for (std::size_t d = 0; d < p.dim; ++d) {
    const double diff = p.cols[d * p.m + j] - p.query[d];
    s += diff * diff;
  }
  return sf2 * std::exp(-inv_two_l2 * s);
}

class SimdTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (avx2_kernels() == nullptr) GTEST_SKIP() << "no AVX2 on this host";
  }
  const KernelTable& scalar() const { return scalar_kernels(); }
  const KernelTable& avx2() const { return *avx2_kernels(); }
};

TEST(SimdDispatch, ActiveTableIsKnown) {
  const KernelTable& t = active_kernels();
  EXPECT_TRUE(t.name == "scalar" || t.name == "avx2") << t.name;
  EXPECT_EQ(scalar_kernels().name, "scalar");
}

TEST(SimdScalar, KernelVectorMatchesDefinition) {
  std::mt19937_64 rng(3);
  const Problem p = random_problem(rng, 13, 2);
  std::vector<double> out(p.m);
  scalar_kernels().rbf_vector(p.cols.data(), p.m, p.dim, p.query.data(), 1.7,
                              0.3, out.data());
  for (std::size_t j = 0; j < p.m; ++j) {
    EXPECT_DOUBLE_EQ(out[j], reference_kernel(p, j, 1.7, 0.3));
  }
}

TEST_F(SimdTest, KernelVectorEquivalent) {
  std::mt19937_64 rng(11);
  for (std::size_t m = 0; m <= 37; ++m) {
    for (std::size_t dim = 1; dim <= 10; ++dim) {
      const Problem p = random_problem(rng, m, dim);
      std::vector<double> a(m), b(m);
      scalar().rbf_vector(p.cols.data(), m, dim, p.query.data(), 2.0, 0.2,
                          a.data());
      avx2().rbf_vector(p.cols.data(), m, dim, p.query.data(), 2.0, 0.2,
                        b.data());
      for (std::size_t j = 0; j < m; ++j) {
        EXPECT_NEAR(a[j], b[j], 1e-14 + 1e-13 * std::abs(a[j]))
            << "m=" << m << " dim=" << dim << " j=" << j;
      }
    }
  }
}

TEST_F(SimdTest, WeightedSumGradientEquivalent) {
  std::mt19937_64 rng(12);
  for (std::size_t m = 0; m <= 37; ++m) {
    for (std::size_t dim = 1; dim <= 10; ++dim) {
      const Problem p = random_problem(rng, m, dim);
      std::vector<double> ga(dim), gb(dim);
      const double sa = scalar().rbf_weighted_sum_grad(
          p.cols.data(), m, dim, p.query.data(), 1.3, 0.25, p.weights.data(),
          ga.data());
      const double sb = avx2().rbf_weighted_sum_grad(
          p.cols.data(), m, dim, p.query.data(), 1.3, 0.25, p.weights.data(),
          gb.data());
      EXPECT_NEAR(sa, sb, 1e-12) << "m=" << m << " dim=" << dim;
      for (std::size_t d = 0; d < dim; ++d) EXPECT_NEAR(ga[d], gb[d], 1e-12);
    }
  }
}

TEST_F(SimdTest, WeightedSumHessianEquivalent) {
  std::mt19937_64 rng(13);
  for (std::size_t m = 0; m <= 37; ++m) {
    for (std::size_t dim = 1; dim <= 6; ++dim) {
      const Problem p = random_problem(rng, m, dim);
      std::vector<double> ga(dim), gb(dim), ha(dim * dim), hb(dim * dim);
      const double sa = scalar().rbf_weighted_sum_grad_hess(
          p.cols.data(), m, dim, p.query.data(), 0.8, 0.4, p.weights.data(),
          ga.data(), ha.data());
      const double sb = avx2().rbf_weighted_sum_grad_hess(
          p.cols.data(), m, dim, p.query.data(), 0.8, 0.4, p.weights.data(),
          gb.data(), hb.data());
      EXPECT_NEAR(sa, sb, 1e-12);
      for (std::size_t d = 0; d < dim; ++d) EXPECT_NEAR(ga[d], gb[d], 1e-12);
      for (std::size_t d = 0; d < dim * dim; ++d) {
        EXPECT_NEAR(ha[d], hb[d], 1e-12) << "m=" << m << " dim=" << dim;
      }
      for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
          EXPECT_EQ(hb[a * dim + b], hb[b * dim + a]);
        }
      }
    }
  }
}

TEST_F(SimdTest, DotEquivalent) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t len = 0; len <= 41; ++len) {
    std::vector<double> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    EXPECT_NEAR(scalar().dot(a.data(), b.data(), len),
                avx2().dot(a.data(), b.data(), len), 1e-12)
        << len;
  }
}

TEST_F(SimdTest, ExpAccuracyAcrossRange) {
  std::vector<double> in;
  for (double x = 0.0; x >= -745.0; x -= 0.37) in.push_back(x);
  in.push_back(-708.0);
  in.push_back(-709.0);
  in.push_back(-1e6);
  std::vector<double> a(in.size()), b(in.size());
  scalar().exp_nonpositive(in.data(), in.size(), a.data());
  avx2().exp_nonpositive(in.data(), in.size(), b.data());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double want = in[i] < -708.0 ? 0.0 : std::exp(in[i]);
    EXPECT_NEAR(a[i], want, 2e-16 * want) << in[i];
    EXPECT_NEAR(b[i], want, 4e-16 * want) << in[i];
  }
}

}  // namespace
}  // namespace sarplan::simd
