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

#ifndef BODYSCHEMA_EXPERIMENT_H_
#define BODYSCHEMA_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bodyschema/direct.h"
#include "bodyschema/estimator.h"
#include "bodyschema/sim.h"

namespace bodyschema {

enum class Strategy { kRandomRls, kRandomGradient, kActiveRls };

std::string StrategyName(Strategy strategy);
// Throws std::invalid_argument for an unknown name.
Strategy ParseStrategy(const std::string& name);

// Initial means are drawn uniformly from `bounds` when given (one per
// parameter), otherwise from the truth +/- w_spread on axis entries and
// +/- v_spread on moment entries.
struct InitHypercube {
  double w_spread = 0.2;
  double v_spread = 0.1;
  std::vector<Bound> bounds;
};

struct ExperimentConfig {
  std::string chain = "planar3";  // built-in name or path to a chain file
  Strategy strategy = Strategy::kRandomRls;
  int iterations = 300;
  std::vector<std::uint64_t> seeds = {1};
  // obs_variance drives both the simulated sensor and the estimator's R.
  NoiseConfig noise;
  GradientConfig gradient;
  DirectConfig optimizer;
  double prior_variance = 1.0;
  InitHypercube init;
  int probe_set_size = 100;
  std::uint64_t probe_seed = 20260101;
  double orientation_threshold = 0.05;
  double location_threshold = 0.02;
  JacobianMethod jacobian = JacobianMethod::kAnalytic;
  std::string output;

  // Throws std::invalid_argument on an invalid combination.
  void Validate() const;
};

struct ExperimentRecord {
  std::string strategy;
  std::uint64_t seed = 0;
  int iteration = 0;
  double orientation_error = 0.0;
  double location_error = 0.0;
  double prediction_error = 0.0;
  std::optional<double> cost;
  std::optional<int> evaluations;
  // Wall clock; kept out of the deterministic record files.
  std::optional<double> selection_seconds;
  int fov_rejections = 0;
  // Configuration visited this iteration and the observation, when visible.
  JointConfig config;
  std::optional<Eigen::Vector3d> observation;
  bool failed = false;
  std::string error;
};

// Resolves `cfg.chain` to a fixture (built-in name first, then file path) and
// applies cfg.noise.obs_variance to it. Throws std::invalid_argument.
GroundTruth ResolveChain(const ExperimentConfig& cfg);

// Fixed probe set of visible configurations with noiseless observations.
std::vector<Observation> MakeProbeSet(const GroundTruth& gt, int size, std::uint64_t seed);

// Runs every seed of cfg.strategy. Per seed: draw the initial mean, then per
// iteration choose q (random or active), measure, update (skipping absent
// observations), inject stabilizing noise every stabilizing_period RLS
// updates and record metrics. A seed that throws ends with a failed record.
std::vector<ExperimentRecord> RunExperiment(const ExperimentConfig& cfg);

// First iteration from which `errors[k]` stays below `threshold` until the
// end of the run (iterations are 1-based). Runs that never settle below the
// threshold are censored at errors.size() + 1.
int IterationsToThreshold(const std::vector<double>& errors, double threshold);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

// Linear-interpolation quartiles. Throws std::invalid_argument when empty.
Quartiles ComputeQuartiles(std::vector<double> values);

struct StrategySummary {
  std::string strategy;
  int seeds = 0;
  int failed_seeds = 0;
  int orientation_reached = 0;
  int location_reached = 0;
  Quartiles orientation_iterations;
  Quartiles location_iterations;
  Quartiles final_orientation;
  Quartiles final_location;
  Quartiles final_prediction;
};

// Per-strategy aggregates over completed seeds, in order of first
// appearance. Throws std::invalid_argument on empty input or when no seed of
// any strategy completed.
std::vector<StrategySummary> Summarize(const std::vector<ExperimentRecord>& records,
                                       double orientation_threshold = 0.05,
                                       double location_threshold = 0.02);

}  // namespace bodyschema

#endif  // BODYSCHEMA_EXPERIMENT_H_
