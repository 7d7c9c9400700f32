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

#include "bodyschema/experiment.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>

#include "bodyschema/active.h"
#include "bodyschema/serialization.h"

namespace bodyschema {

namespace {

// Independent random streams derived from each seed.
enum StreamId : std::uint64_t {
  kInitStream = 0,
  kConfigStream = 1,
  kNoiseStream = 2,
  kProbeStream = 3,
};

Eigen::VectorXd DrawInitialMean(const ExperimentConfig& cfg, const GroundTruth& gt,
                                SeededRng& rng) {
  const Eigen::VectorXd truth = gt.params.ToVector();
  Eigen::VectorXd mean(truth.size());
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (!cfg.init.bounds.empty()) {
      mean[i] = rng.Uniform(cfg.init.bounds[i].lo, cfg.init.bounds[i].hi);
    } else {
      const bool is_axis = (i % kParamsPerJoint) < 3;
      const double spread = is_axis ? cfg.init.w_spread : cfg.init.v_spread;
      mean[i] = rng.Uniform(truth[i] - spread, truth[i] + spread);
    }
  }
  return mean;
}

void RunSeed(const ExperimentConfig& cfg, const GroundTruth& gt,
             const std::shared_ptr<const ObservationModel>& model,
             const std::vector<Observation>& probes, std::uint64_t seed,
             std::vector<ExperimentRecord>& out) {
  SeededRng init_rng(seed, kInitStream);
  SeededRng config_rng(seed, kConfigStream);
  SeededRng noise_rng(seed, kNoiseStream);

  EstimatorState state =
      EstimatorState::WithIsotropicPrior(DrawInitialMean(cfg, gt, init_rng), cfg.prior_variance);
  const std::string strategy = StrategyName(cfg.strategy);
  int rejections = 0;
  long updates = 0;

  for (int iteration = 1; iteration <= cfg.iterations; ++iteration) {
    ExperimentRecord record;
    record.strategy = strategy;
    record.seed = seed;
    record.iteration = iteration;

    if (cfg.strategy == Strategy::kActiveRls) {
      SelectionProblem problem;
      problem.state = state;
      problem.model = model;
      problem.noise = cfg.noise;
      problem.joint_limits = gt.joint_limits;
      problem.fov = gt.fov;
      problem.optimizer = cfg.optimizer;
      SelectionResult selection = SelectNext(problem);
      record.config = std::move(selection.config);
      record.cost = selection.cost;
      record.evaluations = selection.evaluations;
      record.selection_seconds = selection.duration_seconds;
    } else {
      record.config = RandomConfig(gt, config_rng);
    }

    record.observation = Measure(gt, record.config, noise_rng);
    if (!record.observation) {
      ++rejections;
    } else if (cfg.strategy == Strategy::kRandomGradient) {
      state.mean = GradientUpdate(state.mean, *model, record.config, *record.observation,
                                  cfg.gradient, updates);
      ++updates;
    } else {
      try {
        state = RlsUpdate(state, *model, record.config, *record.observation, cfg.noise);
        ++updates;
        if (updates % cfg.noise.stabilizing_period == 0) {
          state = ApplyStabilizingNoise(state, cfg.noise);
        }
      } catch (const DegenerateUpdateError& e) {
        spdlog::debug("seed {} iteration {}: skipped degenerate update", seed, iteration);
      }
    }
    if (!state.mean.allFinite()) {
      throw std::runtime_error("estimate diverged to a non-finite value");
    }

    const ChainErrors errors = Metrics(state.mean, gt);
    record.orientation_error = errors.orientation;
    record.location_error = errors.location;
    record.prediction_error = PredictionError(state.mean, *model, probes);
    record.fov_rejections = rejections;
    out.push_back(std::move(record));
  }
}

}  // namespace

std::string StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kRandomRls:
      return "random_rls";
    case Strategy::kRandomGradient:
      return "random_gradient";
    case Strategy::kActiveRls:
      return "active_rls";
  }
  return "unknown";
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "random_rls") return Strategy::kRandomRls;
  if (name == "random_gradient") return Strategy::kRandomGradient;
  if (name == "active_rls") return Strategy::kActiveRls;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

void ExperimentConfig::Validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (probe_set_size < 1) throw std::invalid_argument("probe_set_size must be >= 1");
  if (!(prior_variance > 0.0)) throw std::invalid_argument("prior_variance must be > 0");
  if (!(init.w_spread >= 0.0) || !(init.v_spread >= 0.0)) {
    throw std::invalid_argument("init spreads must be >= 0");
  }
  for (const Bound& b : init.bounds) {
    if (!(b.lo < b.hi)) throw std::invalid_argument("init_hypercube bounds need lo < hi");
  }
  if (init.bounds.empty() && init.w_spread == 0.0 && init.v_spread == 0.0) {
    throw std::invalid_argument("init_hypercube is degenerate");
  }
  if (optimizer.max_evaluations < 1) {
    throw std::invalid_argument("optimizer.max_evaluations must be >= 1");
  }
  noise.Validate();
  gradient.Validate();
}

GroundTruth ResolveChain(const ExperimentConfig& cfg) {
  GroundTruth gt;
  const std::vector<std::string> names = BuiltinChainNames();
  if (std::find(names.begin(), names.end(), cfg.chain) != names.end()) {
    gt = BuiltinChain(cfg.chain);
  } else if (std::filesystem::exists(cfg.chain)) {
    try {
      gt = LoadChainFile(cfg.chain);
    } catch (const FormatError& e) {
      throw std::invalid_argument(e.what());
    }
  } else {
    throw std::invalid_argument("chain '" + cfg.chain +
                                "' is neither a built-in fixture nor a readable file");
  }
  gt.obs_variance = cfg.noise.obs_variance;
  gt.Validate();
  if (!cfg.init.bounds.empty() &&
      static_cast<int>(cfg.init.bounds.size()) != gt.params.num_params()) {
    throw std::invalid_argument("init_hypercube needs one bound per parameter");
  }
  return gt;
}

std::vector<Observation> MakeProbeSet(const GroundTruth& gt, int size, std::uint64_t seed) {
  SeededRng rng(seed, kProbeStream);
  std::vector<Observation> probes;
  const long max_attempts = 1000L * size;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(probes.size()) < size;
       ++attempt) {
    JointConfig q = RandomConfig(gt, rng);
    const Eigen::Vector3d y = Observe(gt.params, q);
    if (gt.fov.Contains(y)) probes.push_back({std::move(q), y});
  }
  if (static_cast<int>(probes.size()) < size) {
    throw std::invalid_argument("could not find enough visible probe configurations");
  }
  return probes;
}

std::vector<ExperimentRecord> RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const GroundTruth gt = ResolveChain(cfg);
  const auto model = std::make_shared<const ChainObservationModel>(
      gt.num_joints(), gt.params.zero_pose, cfg.jacobian);
  const std::vector<Observation> probes = MakeProbeSet(gt, cfg.probe_set_size, cfg.probe_seed);

  std::vector<ExperimentRecord> records;
  records.reserve(cfg.seeds.size() * static_cast<std::size_t>(cfg.iterations));
  for (std::uint64_t seed : cfg.seeds) {
    const std::size_t first = records.size();
    try {
      RunSeed(cfg, gt, model, probes, seed, records);
      spdlog::info("{} seed {}: orientation {:.4f} rad, location {:.4f} m after {} iterations",
                   StrategyName(cfg.strategy), seed, records.back().orientation_error,
                   records.back().location_error, cfg.iterations);
    } catch (const std::exception& e) {
      spdlog::error("{} seed {} failed: {}", StrategyName(cfg.strategy), seed, e.what());
      ExperimentRecord failure;
      failure.strategy = StrategyName(cfg.strategy);
      failure.seed = seed;
      failure.iteration = static_cast<int>(records.size() - first) + 1;
      failure.failed = true;
      failure.error = e.what();
      records.push_back(std::move(failure));
    }
  }
  return records;
}

int IterationsToThreshold(const std::vector<double>& errors, double threshold) {
  int settled = static_cast<int>(errors.size()) + 1;
  for (int k = static_cast<int>(errors.size()) - 1; k >= 0; --k) {
    if (!(errors[k] < threshold)) break;
    settled = k + 1;
  }
  return settled;
}

Quartiles ComputeQuartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles of an empty set");
  std::sort(values.begin(), values.end());
  const auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::vector<StrategySummary> Summarize(const std::vector<ExperimentRecord>& records,
                                       double orientation_threshold,
                                       double location_threshold) {
  if (records.empty()) throw std::invalid_argument("Summarize: no records");

  struct SeedRun {
    std::vector<double> orientation, location, prediction;
    bool failed = false;
  };
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, SeedRun>> runs;
  for (const ExperimentRecord& r : records) {
    if (!runs.contains(r.strategy)) order.push_back(r.strategy);
    SeedRun& run = runs[r.strategy][r.seed];
    if (r.failed) {
      run.failed = true;
      continue;
    }
    run.orientation.push_back(r.orientation_error);
    run.location.push_back(r.location_error);
    run.prediction.push_back(r.prediction_error);
  }

  std::vector<StrategySummary> summaries;
  for (const std::string& strategy : order) {
    StrategySummary s;
    s.strategy = strategy;
    std::vector<double> ori_iters, loc_iters, final_ori, final_loc, final_pred;
    for (const auto& [seed, run] : runs[strategy]) {
      ++s.seeds;
      if (run.failed || run.orientation.empty()) {
        ++s.failed_seeds;
        continue;
      }
      const int ori = IterationsToThreshold(run.orientation, orientation_threshold);
      const int loc = IterationsToThreshold(run.location, location_threshold);
      const int censored = static_cast<int>(run.orientation.size()) + 1;
      if (ori < censored) ++s.orientation_reached;
      if (loc < censored) ++s.location_reached;
      ori_iters.push_back(ori);
      loc_iters.push_back(loc);
      final_ori.push_back(run.orientation.back());
      final_loc.push_back(run.location.back());
      final_pred.push_back(run.prediction.back());
    }
    if (ori_iters.empty()) continue;
    s.orientation_iterations = ComputeQuartiles(ori_iters);
    s.location_iterations = ComputeQuartiles(loc_iters);
    s.final_orientation = ComputeQuartiles(final_ori);
    s.final_location = ComputeQuartiles(final_loc);
    s.final_prediction = ComputeQuartiles(final_pred);
    summaries.push_back(std::move(s));
  }
  if (summaries.empty()) throw std::invalid_argument("Summarize: every seed failed");
  return summaries;
}

}  // namespace bodyschema
