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

#ifndef BODYSCHEMA_SIM_H_
#define BODYSCHEMA_SIM_H_

#include <boost/random/mersenne_twister.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bodyschema/fov.h"
#include "bodyschema/kinematics.h"

namespace bodyschema {

// Ground-truth chain held by the simulator.
struct GroundTruth {
  std::string name;
  ChainParams params;
  std::vector<JointLimit> joint_limits;
  FieldOfView fov;
  double obs_variance = 1e-4;

  int num_joints() const { return params.num_joints(); }
  // Throws std::invalid_argument if limits do not match the chain, a limit
  // has lo > hi, or a twist is not canonical (|w| = 1).
  void Validate() const;
};

// Deterministic random stream: a 64-bit Mersenne Twister seeded from
// (seed, stream) through SplitMix64, with Boost.Random distributions, whose
// outputs do not depend on the standard library in use. Distinct stream ids
// give statistically independent sequences for the same seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  double Uniform(double lo, double hi);
  double Normal();
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
};

// Noisy end-effector position at q: the true position plus N(0, obs_variance)
// per axis. Three normal draws are consumed on every call so the noise stream
// stays aligned regardless of visibility. Returns nullopt when the true
// position is outside the field of view. Throws std::invalid_argument when q
// is outside the joint limits.
std::optional<Eigen::Vector3d> Measure(const GroundTruth& gt, const JointConfig& q,
                                       SeededRng& rng);

// Uniform configuration within the joint limits.
JointConfig RandomConfig(const GroundTruth& gt, SeededRng& rng);

bool WithinLimits(const std::vector<JointLimit>& limits, const JointConfig& q);

// Built-in fixtures: "planar3", "arm6", "arm12".
GroundTruth BuiltinChain(const std::string& name);
std::vector<std::string> BuiltinChainNames();

struct ChainErrors {
  double orientation = 0.0;  // radians
  double location = 0.0;     // meters
};

// Orientation error: mean over ordered joint pairs (i != j) of
// |angle(w_i_est, w_j_est) - angle(w_i, w_j)|, with estimated axes
// normalized. Location error: mean over joints of the distance between the
// true and the estimated axis lines (closest-point distance between the
// infinite lines; for near-parallel lines, the distance between their points
// closest to the origin). A zero estimated w contributes pi/2 to every pair
// it appears in, and the distance from its v to the true line as location.
ChainErrors Metrics(const Eigen::VectorXd& estimate, const GroundTruth& gt);

// Distance between axis lines through p1, p2 with directions d1, d2.
double AxisLineDistance(const Eigen::Vector3d& p1, const Eigen::Vector3d& d1,
                        const Eigen::Vector3d& p2, const Eigen::Vector3d& d2);

}  // namespace bodyschema

#endif  // BODYSCHEMA_SIM_H_
