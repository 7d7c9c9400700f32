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

#ifndef BODYSCHEMA_ESTIMATOR_H_
#define BODYSCHEMA_ESTIMATOR_H_

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bodyschema/kinematics.h"

namespace bodyschema {

// Gaussian belief N(mean, covariance) over the parameter vector.
struct EstimatorState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return static_cast<int>(mean.size()); }
  // Prior with covariance variance * I.
  static EstimatorState WithIsotropicPrior(Eigen::VectorXd mean, double variance);
};

struct NoiseConfig {
  double obs_variance = 1e-4;          // isotropic R = obs_variance * I
  double stabilizing_variance = 1e-6;  // added to P every stabilizing_period updates
  double state_noise_variance = 0.0;   // Q = state_noise_variance * I before each update
  int stabilizing_period = 10;

  // Throws std::invalid_argument when a variance is negative or the period < 1.
  void Validate() const;
};

struct GradientConfig {
  double learning_rate = 0.5;
  // Step t uses learning_rate / (1 + decay * t).
  double decay = 0.0;

  void Validate() const;
  double RateAt(long step) const { return learning_rate / (1.0 + decay * step); }
};

// The innovation covariance could not be factorized, even with jitter.
class DegenerateUpdateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One EKF/RLS measurement update with Joseph-form covariance:
//   P-  = P + Q
//   K   = P- H^T (H P- H^T + R)^-1
//   x+  = x + K (y - h(x, q))
//   P+  = (I - K H) P- (I - K H)^T + K R K^T
// H is evaluated at the prior mean. Throws DegenerateUpdateError when the
// innovation covariance is not positive definite.
EstimatorState RlsUpdate(const EstimatorState& state, const ObservationModel& model,
                         const JointConfig& q, const Eigen::VectorXd& y,
                         const NoiseConfig& noise);

// Same update with a precomputed Jacobian and prediction.
EstimatorState RlsUpdate(const EstimatorState& state, const Eigen::MatrixXd& jacobian,
                         const Eigen::VectorXd& innovation, const NoiseConfig& noise);

// P <- P + stabilizing_variance * I.
EstimatorState ApplyStabilizingNoise(const EstimatorState& state,
                                     const NoiseConfig& noise);

// Symmetrizes the covariance and clamps eigenvalues below zero.
void SanitizeCovariance(Eigen::MatrixXd& covariance);

// One stochastic-gradient step on 0.5 |y - h(x, q)|^2:
// x <- x + rate * H^T (y - h(x, q)).
Eigen::VectorXd GradientUpdate(const Eigen::VectorXd& mean, const ObservationModel& model,
                               const JointConfig& q, const Eigen::VectorXd& y,
                               const GradientConfig& cfg, long step = 0);

struct Observation {
  JointConfig q;
  Eigen::VectorXd y;
};

// RMS of |y - h(mean, q)| over the dataset. Throws std::invalid_argument on
// an empty dataset.
double PredictionError(const Eigen::VectorXd& mean, const ObservationModel& model,
                       const std::vector<Observation>& dataset);

}  // namespace bodyschema

#endif  // BODYSCHEMA_ESTIMATOR_H_
