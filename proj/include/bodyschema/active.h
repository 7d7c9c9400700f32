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

#ifndef BODYSCHEMA_ACTIVE_H_
#define BODYSCHEMA_ACTIVE_H_

#include <memory>
#include <vector>

#include "bodyschema/direct.h"
#include "bodyschema/estimator.h"
#include "bodyschema/fov.h"
#include "bodyschema/kinematics.h"

namespace bodyschema {

// Everything needed to score a candidate configuration: the current belief,
// the noise model, the joint box and the camera field of view.
struct SelectionProblem {
  EstimatorState state;
  std::shared_ptr<const ObservationModel> model;
  NoiseConfig noise;
  std::vector<JointLimit> joint_limits;
  FieldOfView fov;
  // Bounds are taken from joint_limits.
  DirectConfig optimizer;
  // Constant added to every cost. Does not change the argmin.
  double cost_offset = 0.0;

  void Validate() const;
};

struct SelectionResult {
  JointConfig config;
  double cost = 0.0;
  int evaluations = 0;
  double duration_seconds = 0.0;
  std::vector<DirectEvaluation> trace;
};

// Trace of the covariance after simulating the observation h(mean, q) at q
// (zero innovation) and running one Joseph-form update, Q included. When the
// predicted position leaves the field of view, or the update is degenerate,
// the cost is trace(P) + trace(P).
double LookaheadCost(const SelectionProblem& problem, const JointConfig& q);

// Minimizes LookaheadCost over the joint box with DIRECT.
SelectionResult SelectNext(const SelectionProblem& problem);

// trace(P) - LookaheadCost, for logging.
double GreedyTraceReduction(const SelectionProblem& problem, const JointConfig& q);

}  // namespace bodyschema

#endif  // BODYSCHEMA_ACTIVE_H_
