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

#include "bodyschema/active.h"

#include <chrono>
#include <stdexcept>

namespace bodyschema {

namespace {

constexpr double kJitter = 1e-12;

// Trace of the Joseph-form posterior
//   (I - K H) P- (I - K H)^T + r K K^T,   P- = P + q I,
// expanded so that only n x m products are formed:
//   tr(P-) - 2 tr(K A^T) + tr(K^T K S0) + r |K|_F^2
// with A = P- H^T and S0 = H A. Returns nullopt when S = S0 + r I is not
// positive definite.
std::optional<double> JosephPosteriorTrace(const EstimatorState& state,
                                           const Eigen::MatrixXd& jacobian,
                                           const NoiseConfig& noise) {
  const double q = noise.state_noise_variance;
  const double r = noise.obs_variance;
  const Eigen::MatrixXd a =
      state.covariance * jacobian.transpose() + q * jacobian.transpose();
  const Eigen::MatrixXd s0 = jacobian * a;
  Eigen::MatrixXd s = s0;
  s.diagonal().array() += r;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    s.diagonal().array() += kJitter;
    llt.compute(s);
    if (llt.info() != Eigen::Success) return std::nullopt;
  }
  const Eigen::MatrixXd gain = llt.solve(a.transpose()).transpose();
  const double prior_trace = state.covariance.trace() + q * state.dim();
  const Eigen::MatrixXd gtg = gain.transpose() * gain;
  return prior_trace - 2.0 * gain.cwiseProduct(a).sum() + gtg.cwiseProduct(s0).sum() +
         r * gtg.trace();
}

}  // namespace

void SelectionProblem::Validate() const {
  if (!model) throw std::invalid_argument("SelectionProblem: missing model");
  if (state.dim() != model->param_dim() || state.covariance.rows() != state.dim() ||
      state.covariance.cols() != state.dim()) {
    throw std::invalid_argument("SelectionProblem: state does not match model");
  }
  if (static_cast<int>(joint_limits.size()) != model->config_dim()) {
    throw std::invalid_argument("SelectionProblem: one joint limit per joint required");
  }
  for (const JointLimit& limit : joint_limits) {
    if (!(limit.lo < limit.hi)) {
      throw std::invalid_argument("SelectionProblem: joint limits must satisfy lo < hi");
    }
  }
  noise.Validate();
}

double LookaheadCost(const SelectionProblem& problem, const JointConfig& q) {
  const EstimatorState& state = problem.state;
  const double current_trace = state.covariance.trace();
  const double uninformative = 2.0 * current_trace + problem.cost_offset;

  if (problem.fov.enabled) {
    const Eigen::VectorXd predicted = problem.model->Predict(state.mean, q);
    if (predicted.size() != 3 || !problem.fov.Contains(predicted.head<3>())) {
      return uninformative;
    }
  }
  const Eigen::MatrixXd jacobian = problem.model->Jacobian(state.mean, q);
  const std::optional<double> posterior = JosephPosteriorTrace(state, jacobian, problem.noise);
  if (!posterior) return uninformative;
  return *posterior + problem.cost_offset;
}

double GreedyTraceReduction(const SelectionProblem& problem, const JointConfig& q) {
  return problem.state.covariance.trace() - (LookaheadCost(problem, q) - problem.cost_offset);
}

SelectionResult SelectNext(const SelectionProblem& problem) {
  problem.Validate();
  const auto start = std::chrono::steady_clock::now();

  DirectConfig cfg = problem.optimizer;
  cfg.bounds.clear();
  for (const JointLimit& limit : problem.joint_limits) {
    cfg.bounds.push_back({limit.lo, limit.hi});
  }

  int evaluations = 0;
  const Objective cost = [&](const Eigen::VectorXd& q) {
    ++evaluations;
    return LookaheadCost(problem, q);
  };
  DirectResult found = Minimize(cost, cfg);

  SelectionResult result;
  result.config = std::move(found.best_point);
  result.cost = found.best_value;
  result.evaluations = evaluations;
  result.trace = std::move(found.trace);
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace bodyschema
