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

#ifndef SARPLAN_GP_HPP_
#define SARPLAN_GP_HPP_

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "sarplan/common.hpp"

namespace sarplan {

// RBF kernel hyperparameters. No hyperparameter learning is done; values
// come from the scenario configuration.
struct KernelParams {
  double signal_variance = 1.0;  // sigma_f^2
  double lengthscale = 1.5;      // meters
  double noise_variance = 1e-4;  // sigma_nu^2

  void validate() const;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;

  double stddev() const { return std::sqrt(variance); }
};

// sigma_f^2 * exp(-|a - b|^2 / (2 l^2)).
double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  const KernelParams& params);

// d kernel(a, b) / d a[dim] = -(a[dim] - b[dim]) / l^2 * kernel(a, b).
double rbf_kernel_partial(std::span<const double> a, std::span<const double> b,
                          std::size_t dim, const KernelParams& params);

// Zero-mean GP regression model. Immutable once fitted; all queries are const
// and safe to call concurrently.
class GpModel {
 public:
  // Prior-only model over `dim`-dimensional inputs: mean 0, variance
  // sigma_f^2 everywhere.
  explicit GpModel(std::size_t dim = 2, KernelParams params = {});

  // `inputs` is m x n (one sample per row). Throws InputError on shape
  // problems and NumericalError when the factorization fails even at the
  // largest jitter.
  static GpModel fit(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& observations,
                     const KernelParams& params);

  // Same inputs and factorization, new observation vector.
  GpModel with_observations(const Eigen::VectorXd& observations) const;

  GpPrediction predict(std::span<const double> test) const;
  GpPrediction predict(const Vec2& test) const {
    return predict(std::span<const double>(test.data(), 2));
  }

  double predict_mean(std::span<const double> test) const;
  double predict_mean(const Vec2& test) const {
    return predict_mean(std::span<const double>(test.data(), 2));
  }

  // Gradient of the posterior mean with respect to the test point, written
  // into `grad` (size dim()). Returns the posterior mean as a by-product.
  double predict_mean_gradient(std::span<const double> test,
                               std::span<double> grad) const;
  Eigen::VectorXd predict_mean_gradient(std::span<const double> test) const;
  Vec2 predict_mean_gradient(const Vec2& test) const;

  // Gradient and Hessian (row-major, dim() x dim()) of the posterior mean.
  double predict_mean_hessian(std::span<const double> test,
                              std::span<double> grad,
                              std::span<double> hess) const;
  Vec2 predict_mean_gradient(const Vec2& test, Eigen::Matrix2d& hess) const;

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return size() == 0; }
  const KernelParams& params() const { return params_; }
  // Jitter added to the diagonal in the successful factorization.
  double jitter() const { return jitter_; }

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& observations() const { return observations_; }
  // Lower-triangular L with L L^T = K + (sigma_nu^2 + jitter) I.
  const Eigen::MatrixXd& lower_factor() const { return lower_; }
  const Eigen::VectorXd& weights() const { return alpha_; }

 private:
  void check_dim(std::size_t n) const;

  std::size_t dim_;
  KernelParams params_;
  double jitter_ = 0.0;
  Eigen::MatrixXd inputs_;  // column-major, m x dim
  Eigen::VectorXd observations_;
  Eigen::MatrixXd lower_;
  Eigen::VectorXd alpha_;   // (K + sigma_nu^2 I)^-1 observations
};

}  // namespace sarplan

#endif  // SARPLAN_GP_HPP_
