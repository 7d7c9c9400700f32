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

#include "bodyschema/estimator.h"

#include <cmath>
#include <string>

namespace bodyschema {

namespace {

constexpr double kInnovationJitter = 1e-12;

// Solves S X = B for symmetric positive-definite S, retrying once with a
// small diagonal jitter.
Eigen::MatrixXd SolveInnovation(const Eigen::MatrixXd& innovation_cov,
                                const Eigen::MatrixXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    const Eigen::MatrixXd jittered =
        innovation_cov +
        kInnovationJitter * Eigen::MatrixXd::Identity(innovation_cov.rows(),
                                                      innovation_cov.cols());
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw DegenerateUpdateError("innovation covariance is not positive definite");
    }
  }
  return llt.solve(rhs);
}

}  // namespace

EstimatorState EstimatorState::WithIsotropicPrior(Eigen::VectorXd mean, double variance) {
  EstimatorState state;
  const auto n = mean.size();
  state.mean = std::move(mean);
  state.covariance = variance * Eigen::MatrixXd::Identity(n, n);
  return state;
}

void NoiseConfig::Validate() const {
  if (!(obs_variance >= 0.0) || !(stabilizing_variance >= 0.0) ||
      !(state_noise_variance >= 0.0)) {
    throw std::invalid_argument("noise variances must be non-negative");
  }
  if (stabilizing_period < 1) {
    throw std::invalid_argument("stabilizing_period must be at least 1");
  }
}

void GradientConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(decay >= 0.0)) throw std::invalid_argument("decay must be non-negative");
}

EstimatorState RlsUpdate(const EstimatorState& state, const ObservationModel& model,
                         const JointConfig& q, const Eigen::VectorXd& y,
                         const NoiseConfig& noise) {
  if (!y.allFinite()) throw std::invalid_argument("observation is not finite");
  if (y.size() != model.obs_dim()) {
    throw std::invalid_argument("observation has " + std::to_string(y.size()) +
                                " entries, model expects " +
                                std::to_string(model.obs_dim()));
  }
  const Eigen::MatrixXd jacobian = model.Jacobian(state.mean, q);
  const Eigen::VectorXd innovation = y - model.Predict(state.mean, q);
  return RlsUpdate(state, jacobian, innovation, noise);
}

EstimatorState RlsUpdate(const EstimatorState& state, const Eigen::MatrixXd& jacobian,
                         const Eigen::VectorXd& innovation, const NoiseConfig& noise) {
  const Eigen::Index n = state.mean.size();
  const Eigen::Index m = jacobian.rows();
  if (jacobian.cols() != n || innovation.size() != m) {
    throw std::invalid_argument("RlsUpdate: dimension mismatch");
  }
  Eigen::MatrixXd prior = state.covariance;
  prior.diagonal().array() += noise.state_noise_variance;

  const Eigen::MatrixXd ph = prior * jacobian.transpose();  // n x m
  Eigen::MatrixXd innovation_cov = jacobian * ph;
  innovation_cov.diagonal().array() += noise.obs_variance;
  // K^T = S^-1 (P H^T)^T since S is symmetric.
  const Eigen::MatrixXd gain = SolveInnovation(innovation_cov, ph.transpose()).transpose();

  EstimatorState next;
  next.mean = state.mean + gain * innovation;

  Eigen::MatrixXd reduction = -gain * jacobian;
  reduction.diagonal().array() += 1.0;
  next.covariance = reduction * prior * reduction.transpose() +
                    noise.obs_variance * gain * gain.transpose();
  SanitizeCovariance(next.covariance);
  return next;
}

EstimatorState ApplyStabilizingNoise(const EstimatorState& state,
                                     const NoiseConfig& noise) {
  EstimatorState next = state;
  next.covariance.diagonal().array() += noise.stabilizing_variance;
  return next;
}

void SanitizeCovariance(Eigen::MatrixXd& covariance) {
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(covariance);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.eigenvalues().minCoeff() >= 0.0) return;
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  covariance = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
}

Eigen::VectorXd GradientUpdate(const Eigen::VectorXd& mean, const ObservationModel& model,
                               const JointConfig& q, const Eigen::VectorXd& y,
                               const GradientConfig& cfg, long step) {
  const Eigen::VectorXd residual = y - model.Predict(mean, q);
  return mean + cfg.RateAt(step) * model.Jacobian(mean, q).transpose() * residual;
}

double PredictionError(const Eigen::VectorXd& mean, const ObservationModel& model,
                       const std::vector<Observation>& dataset) {
  if (dataset.empty()) throw std::invalid_argument("PredictionError: empty dataset");
  double sum = 0.0;
  for (const Observation& obs : dataset) {
    sum += (obs.y - model.Predict(mean, obs.q)).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(dataset.size()));
}

}  // namespace bodyschema
