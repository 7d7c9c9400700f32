// Copyright 2026 The Bodyschema Authors
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

// Random fixtures and independent reference computations for the tests.

#ifndef BODYSCHEMA_TESTS_TEST_UTIL_H_
#define BODYSCHEMA_TESTS_TEST_UTIL_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "bodyschema/estimator.h"
#include "bodyschema/kinematics.h"

namespace bodyschema::testing_util {

inline Eigen::Vector3d RandomUnitVector(std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::Vector3d u;
  do {
    u = Eigen::Vector3d(normal(gen), normal(gen), normal(gen));
  } while (u.norm() < 1e-3);
  return u.normalized();
}

inline Twist RandomTwist(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Twist xi;
  xi.w = RandomUnitVector(gen);
  xi.v = Eigen::Vector3d(uniform(gen), uniform(gen), uniform(gen));
  return xi;
}

inline Pose RandomPose(std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::Quaterniond quat(normal(gen), normal(gen), normal(gen), normal(gen));
  quat.normalize();
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Pose pose;
  pose.rotation = quat.toRotationMatrix();
  pose.translation = Eigen::Vector3d(uniform(gen), uniform(gen), uniform(gen));
  return pose;
}

inline ChainParams RandomChain(std::mt19937_64& gen, int joints) {
  ChainParams params;
  for (int i = 0; i < joints; ++i) params.twists.push_back(RandomTwist(gen));
  params.zero_pose = RandomPose(gen);
  return params;
}

inline JointConfig RandomConfig(std::mt19937_64& gen, int joints,
                                double limit = std::numbers::pi) {
  std::uniform_real_distribution<double> uniform(-limit, limit);
  JointConfig q(joints);
  for (int i = 0; i < joints; ++i) q[i] = uniform(gen);
  return q;
}

// exp of the 4x4 generator [[w^, v], [0, 0]] * angle via Eigen's
// scaling-and-squaring Pade matrix exponential.
inline Eigen::Matrix4d TwistMatrixExp(const Twist& xi, double angle) {
  Eigen::Matrix4d generator = Eigen::Matrix4d::Zero();
  generator.topLeftCorner<3, 3>() = Skew(xi.w);
  generator.topRightCorner<3, 1>() = xi.v;
  return (generator * angle).exp();
}

// Elementwise agreement within max(rel * |reference|, abs).
inline bool JacobianAgrees(const Eigen::MatrixXd& actual, const Eigen::MatrixXd& reference,
                           double rel = 1e-5, double abs = 1e-8) {
  if (actual.rows() != reference.rows() || actual.cols() != reference.cols()) return false;
  for (Eigen::Index r = 0; r < actual.rows(); ++r) {
    for (Eigen::Index c = 0; c < actual.cols(); ++c) {
      const double tol = std::max(rel * std::abs(reference(r, c)), abs);
      if (!(std::abs(actual(r, c) - reference(r, c)) <= tol)) return false;
    }
  }
  return true;
}

// Linear observation model h(x, q) = A(q) x where A(q) is reshaped from q
// (row-major, obs_dim x param_dim).
class LinearModel final : public ObservationModel {
 public:
  LinearModel(int param_dim, int obs_dim) : param_dim_(param_dim), obs_dim_(obs_dim) {}
  int param_dim() const override { return param_dim_; }
  int obs_dim() const override { return obs_dim_; }
  int config_dim() const override { return param_dim_ * obs_dim_; }
  Eigen::MatrixXd Matrix(const JointConfig& q) const {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(q.data(), obs_dim_, param_dim_);
  }
  Eigen::VectorXd Predict(const Eigen::VectorXd& x, const JointConfig& q) const override {
    return Matrix(q) * x;
  }
  Eigen::MatrixXd Jacobian(const Eigen::VectorXd&, const JointConfig& q) const override {
    return Matrix(q);
  }

 private:
  int param_dim_;
  int obs_dim_;
};

// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd RandomSpd(std::mt19937_64& gen, int n, double lo = 0.1,
                                 double hi = 2.0) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd basis = qr.householderQ();
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::VectorXd values(n);
  for (int i = 0; i < n; ++i) values[i] = eig(gen);
  Eigen::MatrixXd spd = basis * values.asDiagonal() * basis.transpose();
  return 0.5 * (spd + spd.transpose());
}

// Covariance after measurement updates in information form,
// (P^-1 + sum_t H_t^T R^-1 H_t)^-1.
inline Eigen::MatrixXd InformationFormPosterior(const Eigen::MatrixXd& prior,
                                                const Eigen::MatrixXd& stacked_jacobian,
                                                double obs_variance) {
  const Eigen::MatrixXd information =
      prior.inverse() + stacked_jacobian.transpose() * stacked_jacobian / obs_variance;
  return information.inverse();
}

}  // namespace bodyschema::testing_util

#endif  // BODYSCHEMA_TESTS_TEST_UTIL_H_
