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

#include "bodyschema/kinematics.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bodyschema {

namespace {

// Below this rotation magnitude the trigonometric coefficients switch to
// their Taylor series.
constexpr double kSeriesThreshold = 0.05;

// Coefficients of exp(Phi) = I + alpha Phi + beta Phi^2 and of the left
// Jacobian J = I + beta Phi + gamma Phi^2, together with c'(s)/s for each,
// where s = |phi|.
struct ExpCoefficients {
  double alpha, beta, gamma;
  double dalpha, dbeta, dgamma;  // c'(s) / s
};

ExpCoefficients ComputeCoefficients(double s) {
  ExpCoefficients c;
  const double s2 = s * s;
  if (s < kSeriesThreshold) {
    const double s4 = s2 * s2;
    const double s6 = s4 * s2;
    c.alpha = 1.0 - s2 / 6.0 + s4 / 120.0 - s6 / 5040.0;
    c.beta = 0.5 - s2 / 24.0 + s4 / 720.0 - s6 / 40320.0;
    c.gamma = 1.0 / 6.0 - s2 / 120.0 + s4 / 5040.0 - s6 / 362880.0;
    c.dalpha = -1.0 / 3.0 + s2 / 30.0 - s4 / 840.0;
    c.dbeta = -1.0 / 12.0 + s2 / 180.0 - s4 / 6720.0;
    c.dgamma = -1.0 / 60.0 + s2 / 1260.0 - s4 / 60480.0;
    return c;
  }
  const double sn = std::sin(s);
  const double cs = std::cos(s);
  const double half = std::sin(0.5 * s);
  const double one_minus_cos = 2.0 * half * half;
  const double s3 = s2 * s;
  c.alpha = sn / s;
  c.beta = one_minus_cos / s2;
  c.gamma = (s - sn) / s3;
  c.dalpha = (s * cs - sn) / s3;
  c.dbeta = (s * sn - 2.0 * one_minus_cos) / (s2 * s2);
  c.dgamma = one_minus_cos / (s2 * s2) - 3.0 * (s - sn) / (s3 * s2);
  return c;
}

// Jacobian with respect to phi of c1(|phi|) phi x u + c2(|phi|) phi x (phi x u)
// for fixed u. `dc1` and `dc2` are c'(s)/s.
Eigen::Matrix3d SeriesTermJacobian(const Eigen::Vector3d& phi,
                                   const Eigen::Vector3d& u, double c1,
                                   double dc1, double c2, double dc2) {
  const Eigen::Vector3d cross = phi.cross(u);
  const Eigen::Vector3d double_cross = phi.cross(cross);
  Eigen::Matrix3d d = -c1 * Skew(u);
  d += dc1 * cross * phi.transpose();
  d += c2 * (phi.dot(u) * Eigen::Matrix3d::Identity() + phi * u.transpose() -
             2.0 * u * phi.transpose());
  d += dc2 * double_cross * phi.transpose();
  return d;
}

void CheckConfig(const ChainParams& params, const JointConfig& q) {
  if (q.size() != params.num_joints()) {
    throw std::invalid_argument("joint config has " + std::to_string(q.size()) +
                                " entries, chain has " +
                                std::to_string(params.num_joints()) + " joints");
  }
  if (!q.allFinite()) throw std::invalid_argument("joint config is not finite");
}

// Derivative of exp(xi angle) * point with respect to (w, v): 3 x 6.
Eigen::Matrix<double, 3, 6> TwistActionJacobian(const Twist& xi, double angle,
                                                const Eigen::Vector3d& point) {
  const Eigen::Vector3d phi = angle * xi.w;
  const Eigen::Vector3d u = angle * xi.v;
  const ExpCoefficients c = ComputeCoefficients(phi.norm());
  Eigen::Matrix<double, 3, 6> jac;
  jac.leftCols<3>() =
      angle * (SeriesTermJacobian(phi, point, c.alpha, c.dalpha, c.beta, c.dbeta) +
               SeriesTermJacobian(phi, u, c.beta, c.dbeta, c.gamma, c.dgamma));
  const Eigen::Matrix3d skew = Skew(phi);
  jac.rightCols<3>() = angle * (Eigen::Matrix3d::Identity() + c.beta * skew +
                                c.gamma * skew * skew);
  return jac;
}

Eigen::MatrixXd AnalyticJacobian(const ChainParams& params, const JointConfig& q) {
  const int n = params.num_joints();
  std::vector<Pose> exps(n);
  for (int i = 0; i < n; ++i) exps[i] = TwistExp(params.twists[i], q[i]);

  // distal[i] = exp_{i+1} ... exp_n applied to the zero-pose position.
  std::vector<Eigen::Vector3d> distal(n);
  Eigen::Vector3d point = params.zero_pose.translation;
  for (int i = n - 1; i >= 0; --i) {
    distal[i] = point;
    point = exps[i].Apply(point);
  }

  Eigen::MatrixXd jac(3, params.num_params());
  Eigen::Matrix3d proximal = Eigen::Matrix3d::Identity();
  for (int i = 0; i < n; ++i) {
    jac.middleCols<6>(kParamsPerJoint * i) =
        proximal * TwistActionJacobian(params.twists[i], q[i], distal[i]);
    proximal = proximal * exps[i].rotation;
  }
  return jac;
}

}  // namespace

Eigen::Vector3d Twist::AxisPoint() const {
  const double norm2 = w.squaredNorm();
  if (norm2 == 0.0) return Eigen::Vector3d::Zero();
  return w.cross(v) / norm2;
}

Eigen::Matrix4d Pose::Homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Eigen::VectorXd ChainParams::ToVector() const {
  Eigen::VectorXd x(num_params());
  for (int i = 0; i < num_joints(); ++i) {
    x.segment<3>(kParamsPerJoint * i) = twists[i].w;
    x.segment<3>(kParamsPerJoint * i + 3) = twists[i].v;
  }
  return x;
}

ChainParams ChainParams::WithVector(const Eigen::VectorXd& x) const {
  if (x.size() != num_params()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(x.size()) +
                                " entries, expected " + std::to_string(num_params()));
  }
  return FromVector(x, zero_pose);
}

ChainParams ChainParams::FromVector(const Eigen::VectorXd& x, const Pose& zero_pose) {
  if (x.size() == 0 || x.size() % kParamsPerJoint != 0) {
    throw std::invalid_argument("parameter vector size must be a positive multiple of 6");
  }
  ChainParams params;
  params.zero_pose = zero_pose;
  const int n = static_cast<int>(x.size()) / kParamsPerJoint;
  params.twists.resize(n);
  for (int i = 0; i < n; ++i) {
    params.twists[i].w = x.segment<3>(kParamsPerJoint * i);
    params.twists[i].v = x.segment<3>(kParamsPerJoint * i + 3);
  }
  return params;
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& u) {
  Eigen::Matrix3d m;
  m << 0.0, -u.z(), u.y(),
       u.z(), 0.0, -u.x(),
       -u.y(), u.x(), 0.0;
  return m;
}

Pose TwistExp(const Twist& xi, double angle) {
  if (!xi.IsFinite() || !std::isfinite(angle)) {
    throw std::invalid_argument("TwistExp: non-finite input");
  }
  const Eigen::Vector3d phi = angle * xi.w;
  const ExpCoefficients c = ComputeCoefficients(phi.norm());
  const Eigen::Matrix3d skew = Skew(phi);
  const Eigen::Matrix3d skew2 = skew * skew;
  Pose pose;
  pose.rotation = Eigen::Matrix3d::Identity() + c.alpha * skew + c.beta * skew2;
  pose.translation =
      (Eigen::Matrix3d::Identity() + c.beta * skew + c.gamma * skew2) * (angle * xi.v);
  return pose;
}

Pose ForwardKinematics(const ChainParams& params, const JointConfig& q) {
  CheckConfig(params, q);
  Pose pose;
  for (int i = 0; i < params.num_joints(); ++i) {
    pose = pose * TwistExp(params.twists[i], q[i]);
  }
  return pose * params.zero_pose;
}

Eigen::Vector3d Observe(const ChainParams& params, const JointConfig& q) {
  CheckConfig(params, q);
  // Push the zero-pose position through the joints from the distal end.
  Eigen::Vector3d point = params.zero_pose.translation;
  for (int i = params.num_joints() - 1; i >= 0; --i) {
    point = TwistExp(params.twists[i], q[i]).Apply(point);
  }
  return point;
}

Eigen::MatrixXd ObservationJacobian(const ChainParams& params, const JointConfig& q,
                                    JacobianMethod method) {
  CheckConfig(params, q);
  if (method == JacobianMethod::kFiniteDifference) {
    return ObservationJacobianFiniteDifference(params, q);
  }
  return AnalyticJacobian(params, q);
}

Eigen::MatrixXd ObservationJacobianFiniteDifference(const ChainParams& params,
                                                    const JointConfig& q,
                                                    double step) {
  CheckConfig(params, q);
  const Eigen::VectorXd x = params.ToVector();
  Eigen::MatrixXd jac(3, x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + step;
    const Eigen::Vector3d plus = Observe(params.WithVector(probe), q);
    probe[j] = x[j] - step;
    const Eigen::Vector3d minus = Observe(params.WithVector(probe), q);
    probe[j] = x[j];
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

ChainObservationModel::ChainObservationModel(int num_joints, Pose zero_pose,
                                             JacobianMethod method)
    : num_joints_(num_joints), zero_pose_(std::move(zero_pose)), method_(method) {
  if (num_joints < 1) throw std::invalid_argument("chain needs at least one joint");
}

Eigen::VectorXd ChainObservationModel::Predict(const Eigen::VectorXd& x,
                                               const JointConfig& q) const {
  return Observe(ChainParams::FromVector(x, zero_pose_), q);
}

Eigen::MatrixXd ChainObservationModel::Jacobian(const Eigen::VectorXd& x,
                                                const JointConfig& q) const {
  return ObservationJacobian(ChainParams::FromVector(x, zero_pose_), q, method_);
}

}  // namespace bodyschema
