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

#include "sarplan/gp.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sarplan/simd/kernels.hpp"

namespace sarplan {
namespace {

constexpr double kInitialJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;

double inv_two_l2(const KernelParams& p) {
  return 1.0 / (2.0 * p.lengthscale * p.lengthscale);
}

}  // namespace

void KernelParams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InputError("kernel: signal_variance must be > 0");
  }
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InputError("kernel: lengthscale must be > 0");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InputError("kernel: noise_variance must be >= 0");
  }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  const KernelParams& params) {
  if (a.size() != b.size()) {
    throw InputError("rbf_kernel: dimension mismatch");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return params.signal_variance * std::exp(-sq * inv_two_l2(params));
}

double rbf_kernel_partial(std::span<const double> a, std::span<const double> b,
                          std::size_t dim, const KernelParams& params) {
  if (dim >= a.size()) throw InputError("rbf_kernel_partial: dim out of range");
  const double l2 = params.lengthscale * params.lengthscale;
  return -(a[dim] - b[dim]) / l2 * rbf_kernel(a, b, params);
}

GpModel::GpModel(std::size_t dim, KernelParams params)
    : dim_(dim), params_(params), inputs_(0, static_cast<Eigen::Index>(dim)) {
  params_.validate();
}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& observations,
                     const KernelParams& params) {
  params.validate();
  const Eigen::Index m = inputs.rows();
  if (m < 1) throw InputError("gp fit: need at least one sample");
  if (observations.size() != m) {
    throw InputError("gp fit: inputs and observations differ in length");
  }
  if (inputs.cols() < 1) throw InputError("gp fit: zero-dimensional inputs");

  GpModel model(static_cast<std::size_t>(inputs.cols()), params);
  model.inputs_ = inputs;
  model.observations_ = observations;

  const auto& kern = simd::active_kernels();
  const std::size_t n = model.dim_;
  const double scale = inv_two_l2(params);
  Eigen::MatrixXd gram(m, m);
  std::vector<double> row(static_cast<std::size_t>(m));
  std::vector<double> query(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      query[d] = model.inputs_(i, static_cast<Eigen::Index>(d));
    }
    kern.rbf_vector(model.inputs_.data(), static_cast<std::size_t>(m), n,
                    query.data(), params.signal_variance, scale, row.data());
    for (Eigen::Index j = 0; j < m; ++j) gram(i, j) = row[j];
  }
  // Symmetrize so round-off in the vector exp cannot break symmetry.
  gram = 0.5 * (gram + gram.transpose()).eval();

  const double base = params.signal_variance;
  for (double jitter = kInitialJitter; jitter <= kMaxJitter * 1.0000001;
       jitter *= 10.0) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += params.noise_variance + jitter * base;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      model.jitter_ = jitter * base;
      model.lower_ = llt.matrixL();
      model.alpha_ = llt.solve(observations);
      return model;
    }
  }

  Eigen::MatrixXd a = gram;
  a.diagonal().array() += params.noise_variance;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  std::ostringstream msg;
  msg << "gp fit: Cholesky failed at max jitter " << kMaxJitter * base
      << "; eigenvalue range [" << ev.minCoeff() << ", " << ev.maxCoeff()
      << "], condition estimate "
      << (ev.minCoeff() > 0 ? ev.maxCoeff() / ev.minCoeff()
                            : std::numeric_limits<double>::infinity());
  throw NumericalError(msg.str());
}

GpModel GpModel::with_observations(const Eigen::VectorXd& observations) const {
  if (observations.size() != inputs_.rows()) {
    throw InputError("gp: observation count does not match inputs");
  }
  GpModel model = *this;
  model.observations_ = observations;
  if (!empty()) {
    model.alpha_ = lower_.transpose().triangularView<Eigen::Upper>().solve(
        lower_.triangularView<Eigen::Lower>().solve(observations));
  }
  return model;
}

void GpModel::check_dim(std::size_t n) const {
  if (n != dim_) throw InputError("gp: test point dimension mismatch");
}

GpPrediction GpModel::predict(std::span<const double> test) const {
  check_dim(test.size());
  if (empty()) return {0.0, params_.signal_variance};
  const auto m = static_cast<std::size_t>(size());
  Eigen::VectorXd k(static_cast<Eigen::Index>(m));
  const auto& kern = simd::active_kernels();
  kern.rbf_vector(inputs_.data(), m, dim_, test.data(),
                  params_.signal_variance, inv_two_l2(params_), k.data());
  GpPrediction out;
  out.mean = kern.dot(k.data(), alpha_.data(), m);
  lower_.triangularView<Eigen::Lower>().solveInPlace(k);
  const double var = params_.signal_variance - k.squaredNorm();
  out.variance = var > 0.0 ? var : 0.0;
  return out;
}

double GpModel::predict_mean(std::span<const double> test) const {
  check_dim(test.size());
  if (empty()) return 0.0;
  std::array<double, simd::kMaxVectorDim> grad{};
  if (dim_ <= grad.size()) {
    return predict_mean_gradient(test, std::span<double>(grad.data(), dim_));
  }
  std::vector<double> big(dim_);
  return predict_mean_gradient(test, big);
}

double GpModel::predict_mean_gradient(std::span<const double> test,
                                      std::span<double> grad) const {
  check_dim(test.size());
  if (grad.size() != dim_) throw InputError("gp: gradient buffer size");
  if (empty()) {
    for (double& g : grad) g = 0.0;
    return 0.0;
  }
  const double mean = simd::active_kernels().rbf_weighted_sum_grad(
      inputs_.data(), size(), dim_, test.data(), params_.signal_variance,
      inv_two_l2(params_), alpha_.data(), grad.data());
  const double inv_l2 = 1.0 / (params_.lengthscale * params_.lengthscale);
  for (double& g : grad) g *= inv_l2;
  return mean;
}

Eigen::VectorXd GpModel::predict_mean_gradient(
    std::span<const double> test) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(dim_));
  predict_mean_gradient(test, std::span<double>(g.data(), dim_));
  return g;
}

Vec2 GpModel::predict_mean_gradient(const Vec2& test) const {
  Vec2 g;
  predict_mean_gradient(std::span<const double>(test.data(), 2),
                        std::span<double>(g.data(), 2));
  return g;
}

double GpModel::predict_mean_hessian(std::span<const double> test,
                                     std::span<double> grad,
                                     std::span<double> hess) const {
  check_dim(test.size());
  if (grad.size() != dim_ || hess.size() != dim_ * dim_) {
    throw InputError("gp: gradient/hessian buffer size");
  }
  if (empty()) {
    for (double& g : grad) g = 0.0;
    for (double& h : hess) h = 0.0;
    return 0.0;
  }
  const double mean = simd::active_kernels().rbf_weighted_sum_grad_hess(
      inputs_.data(), size(), dim_, test.data(), params_.signal_variance,
      inv_two_l2(params_), alpha_.data(), grad.data(), hess.data());
  const double inv_l2 = 1.0 / (params_.lengthscale * params_.lengthscale);
  for (double& g : grad) g *= inv_l2;
  for (double& h : hess) h *= inv_l2 * inv_l2;
  for (std::size_t d = 0; d < dim_; ++d) hess[d * dim_ + d] -= mean * inv_l2;
  return mean;
}

Vec2 GpModel::predict_mean_gradient(const Vec2& test, Eigen::Matrix2d& hess) const {
  Vec2 g;
  double h[4];
  predict_mean_hessian(std::span<const double>(test.data(), 2),
                       std::span<double>(g.data(), 2), std::span<double>(h, 4));
  hess << h[0], h[1], h[2], h[3];
  return g;
}

}  // namespace sarplan
