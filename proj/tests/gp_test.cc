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
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sarplan/gp.hpp"

namespace sarplan {
namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data random_data(std::mt19937_64& rng, int m, int dim, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::normal_distribution<double> n(0.0, 1.0);
  Data d{Eigen::MatrixXd(m, dim), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < dim; ++k) d.x(i, k) = u(rng);
    d.y(i) = n(rng);
  }
  return d;
}

// Dense textbook posterior, computed without the library's kernels.
GpPrediction dense_posterior(const Data& d, const Eigen::VectorXd& q,
                             const KernelParams& p, double jitter) {
  const int m = static_cast<int>(d.x.rows());
  auto k = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return p.signal_variance *
           std::exp(-(a - b).squaredNorm() / (2.0 * p.lengthscale * p.lengthscale));
  };
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd ks(m);
  for (int i = 0; i < m; ++i) {
    ks(i) = k(d.x.row(i).transpose(), q);
    for (int j = 0; j < m; ++j) {
      gram(i, j) = k(d.x.row(i).transpose(), d.x.row(j).transpose());
    }
  }
  gram.diagonal().array() += p.noise_variance + jitter;
  const Eigen::VectorXd alpha = gram.ldlt().solve(d.y);
  const Eigen::VectorXd v = gram.ldlt().solve(ks);
  return {ks.dot(alpha), p.signal_variance - ks.dot(v)};
}

TEST(Kernel, ValueAndPartial) {
  const KernelParams p{2.0, 1.5, 0.0};
  const double a[] = {1.0, 2.0};
  const double b[] = {0.5, 3.0};
  const double r2 = 0.25 + 1.0;
  EXPECT_DOUBLE_EQ(rbf_kernel(a, b, p), 2.0 * std::exp(-r2 / 4.5));
  EXPECT_DOUBLE_EQ(rbf_kernel_partial(a, b, 0, p),
                   -0.5 / 2.25 * rbf_kernel(a, b, p));
  EXPECT_DOUBLE_EQ(rbf_kernel(a, a, p), 2.0);
  EXPECT_THROW(rbf_kernel_partial(a, b, 2, p), InputError);
}

TEST(Kernel, RejectsBadParams) {
  EXPECT_THROW((KernelParams{0.0, 1.0, 0.0}.validate()), InputError);
  EXPECT_THROW((KernelParams{1.0, -1.0, 0.0}.validate()), InputError);
  EXPECT_THROW((KernelParams{1.0, 1.0, -1e-3}.validate()), InputError);
}

TEST(GpModel, PriorOnlyModel) {
  const GpModel gp(2, KernelParams{1.7, 1.0, 0.0});
  const GpPrediction p = gp.predict(Vec2(3.0, 4.0));
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_DOUBLE_EQ(p.variance, 1.7);
  EXPECT_EQ(gp.predict_mean_gradient(Vec2(1.0, 1.0)), Vec2::Zero());
  EXPECT_TRUE(gp.empty());
}

TEST(GpModel, NoiseFreeInterpolation) {
  std::mt19937_64 rng(5);
  const KernelParams p{1.0, 1.5, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    const Data d = random_data(rng, 25, 2, 10.0);
    const GpModel gp = GpModel::fit(d.x, d.y, p);
    for (int i = 0; i < d.x.rows(); ++i) {
      const Vec2 q = d.x.row(i).transpose();
      EXPECT_NEAR(gp.predict_mean(q), d.y(i), 1e-6);
      EXPECT_LT(gp.predict(q).variance, 1e-6);
    }
  }
}

TEST(GpModel, MatchesDensePosterior) {
  std::mt19937_64 rng(6);
  const KernelParams p{1.3, 2.0, 1e-2};
  for (int dim = 1; dim <= 5; ++dim) {
    const Data d = random_data(rng, 30, dim, 8.0);
    const GpModel gp = GpModel::fit(d.x, d.y, p);
    for (int t = 0; t < 10; ++t) {
      const Data q = random_data(rng, 1, dim, 8.0);
      const Eigen::VectorXd qv = q.x.row(0).transpose();
      const GpPrediction want = dense_posterior(d, qv, p, gp.jitter());
      const GpPrediction got =
          gp.predict(std::span<const double>(qv.data(), qv.size()));
      EXPECT_NEAR(got.mean, want.mean, 1e-8);
      EXPECT_NEAR(got.variance, want.variance, 1e-8);
      EXPECT_GE(got.variance, 0.0);
    }
  }
}

TEST(GpModel, GradientAndHessianMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.0, 9.0);
  const KernelParams p{1.0, 1.5, 1e-4};
  const Data d = random_data(rng, 40, 2, 10.0);
  const GpModel gp = GpModel::fit(d.x, d.y, p);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const Vec2 q(u(rng), u(rng));
    Eigen::Matrix2d hess;
    const Vec2 g = gp.predict_mean_gradient(q, hess);
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e(k) = h;
      const double fd = (gp.predict_mean(Vec2(q + e)) - gp.predict_mean(Vec2(q - e))) / (2 * h);
      EXPECT_NEAR(g(k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      const Vec2 gd = (gp.predict_mean_gradient(Vec2(q + e)) -
                       gp.predict_mean_gradient(Vec2(q - e))) / (2 * h);
      EXPECT_NEAR(hess(0, k), gd(0), 1e-5 * std::max(1.0, gd.norm()));
      EXPECT_NEAR(hess(1, k), gd(1), 1e-5 * std::max(1.0, gd.norm()));
    }
    EXPECT_DOUBLE_EQ(hess(0, 1), hess(1, 0));
  }
}

TEST(GpModel, WithObservationsEqualsFreshFit) {
  std::mt19937_64 rng(8);
  const KernelParams p{1.0, 1.5, 1e-3};
  const Data d = random_data(rng, 30, 2, 10.0);
  const Data e = random_data(rng, 30, 2, 10.0);
  const GpModel a = GpModel::fit(d.x, d.y, p).with_observations(e.y);
  const GpModel b = GpModel::fit(d.x, e.y, p);
  for (int t = 0; t < 20; ++t) {
    const Vec2 q = random_data(rng, 1, 2, 10.0).x.row(0).transpose();
    EXPECT_NEAR(a.predict_mean(q), b.predict_mean(q), 1e-10);
    EXPECT_NEAR(a.predict(q).variance, b.predict(q).variance, 1e-12);
  }
  EXPECT_THROW(a.with_observations(Eigen::VectorXd::Zero(3)), InputError);
}

TEST(GpModel, DuplicateInputsFactorWithJitter) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 1, 1, 2, 2;
  const Eigen::VectorXd y = Eigen::Vector3d(1.0, 1.0, 0.5);
  const GpModel gp = GpModel::fit(x, y, KernelParams{1.0, 1.0, 0.0});
  EXPECT_GT(gp.jitter(), 0.0);
  EXPECT_NEAR(gp.predict_mean(Vec2(1, 1)), 1.0, 1e-4);
}

TEST(GpModel, ShapeErrors) {
  const KernelParams p;
  EXPECT_THROW(GpModel::fit(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), p),
               InputError);
  EXPECT_THROW(GpModel::fit(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd(2), p),
               InputError);
  const GpModel gp = GpModel::fit(Eigen::MatrixXd::Zero(1, 3),
                                  Eigen::VectorXd::Ones(1), p);
  const double q[] = {0.0, 0.0};
  EXPECT_THROW(gp.predict(q), InputError);
  const double q3[] = {0.0, 0.0, 0.0};
  double grad[2];
  EXPECT_THROW(gp.predict_mean_gradient(q3, grad), InputError);
}

}  // namespace
}  // namespace sarplan
