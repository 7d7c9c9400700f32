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

#ifndef BODYSCHEMA_KINEMATICS_H_
#define BODYSCHEMA_KINEMATICS_H_

#include <Eigen/Dense>
#include <vector>

namespace bodyschema {

// Joint axis parameters of a serial chain. `w` is the rotation axis
// direction (unit length for a canonical revolute joint), `v` the moment
// term. A zero `w` describes a pure translation along `v`.
struct Twist {
  Eigen::Vector3d w = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();

  bool IsFinite() const { return w.allFinite() && v.allFinite(); }
  // Closest point to the origin on the rotation axis, w x v / |w|^2.
  Eigen::Vector3d AxisPoint() const;
};

// Rigid transform. Rotation is orthonormal with determinant +1.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }
  Eigen::Matrix4d Homogeneous() const;
  Eigen::Vector3d Apply(const Eigen::Vector3d& point) const {
    return rotation * point + translation;
  }
  Pose operator*(const Pose& rhs) const {
    return Pose{rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
};

// Parameters of an n-joint chain. The estimated parameter vector is laid out
// as (w1, v1, w2, v2, ..., wn, vn); the zero-configuration pose is known.
struct ChainParams {
  std::vector<Twist> twists;
  Pose zero_pose;

  int num_joints() const { return static_cast<int>(twists.size()); }
  int num_params() const { return 6 * num_joints(); }

  Eigen::VectorXd ToVector() const;
  // Rebuilds the twists from a parameter vector with the layout above,
  // keeping `zero_pose`. Throws std::invalid_argument on size mismatch.
  ChainParams WithVector(const Eigen::VectorXd& x) const;
  static ChainParams FromVector(const Eigen::VectorXd& x, const Pose& zero_pose);
};

// Per-joint interval [lo, hi] in radians.
struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
};

using JointConfig = Eigen::VectorXd;

inline constexpr int kParamsPerJoint = 6;

Eigen::Matrix3d Skew(const Eigen::Vector3d& u);

// Exponential of the twist generator [[w^, v], [0, 0]] * angle. For unit w
// the rotation is the Rodrigues rotation about w and the translation is
// (I - R)(w x v) + w w^T v angle. Non-unit w is handled exactly (rotation by
// |w| * angle); w = 0 yields the pure translation v * angle.
// Throws std::invalid_argument on non-finite input.
Pose TwistExp(const Twist& xi, double angle);

// Product of exponentials: exp(xi_1 q_1) ... exp(xi_n q_n) * zero_pose.
Pose ForwardKinematics(const ChainParams& params, const JointConfig& q);

// End-effector position, the translation of ForwardKinematics.
Eigen::Vector3d Observe(const ChainParams& params, const JointConfig& q);

enum class JacobianMethod { kAnalytic, kFiniteDifference };

// d Observe / d (parameter vector), a 3 x 6n matrix.
Eigen::MatrixXd ObservationJacobian(
    const ChainParams& params, const JointConfig& q,
    JacobianMethod method = JacobianMethod::kAnalytic);

// Central finite differences with the given per-parameter step.
Eigen::MatrixXd ObservationJacobianFiniteDifference(const ChainParams& params,
                                                    const JointConfig& q,
                                                    double step = 1e-6);

// Observation model over the flat parameter vector. This is the interface
// the estimator and the action selection work against, so linear fixtures
// can stand in for a kinematic chain in tests.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;
  virtual int param_dim() const = 0;
  virtual int obs_dim() const = 0;
  virtual int config_dim() const = 0;
  virtual Eigen::VectorXd Predict(const Eigen::VectorXd& x,
                                  const JointConfig& q) const = 0;
  virtual Eigen::MatrixXd Jacobian(const Eigen::VectorXd& x,
                                   const JointConfig& q) const = 0;
};

// Kinematic chain observation model: h(x, q) = Observe(chain(x), q).
class ChainObservationModel final : public ObservationModel {
 public:
  ChainObservationModel(int num_joints, Pose zero_pose,
                        JacobianMethod method = JacobianMethod::kAnalytic);

  int param_dim() const override { return kParamsPerJoint * num_joints_; }
  int obs_dim() const override { return 3; }
  int config_dim() const override { return num_joints_; }
  Eigen::VectorXd Predict(const Eigen::VectorXd& x,
                          const JointConfig& q) const override;
  Eigen::MatrixXd Jacobian(const Eigen::VectorXd& x,
                           const JointConfig& q) const override;

  const Pose& zero_pose() const { return zero_pose_; }

 private:
  int num_joints_;
  Pose zero_pose_;
  JacobianMethod method_;
};

}  // namespace bodyschema

#endif  // BODYSCHEMA_KINEMATICS_H_
