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

#include "bodyschema/sim.h"

#include <spdlog/spdlog.h>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bodyschema {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Default joint excursion for the simulated fixtures.
constexpr double kJointExcursion = 40.0 * kDeg;
// Below this |d1 x d2| two axis lines are treated as parallel.
constexpr double kParallelTolerance = 1e-6;

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Revolute joint with unit axis `w` through `point`.
Twist RevoluteAt(const Eigen::Vector3d& w, const Eigen::Vector3d& point) {
  Twist xi;
  xi.w = w.normalized();
  xi.v = -xi.w.cross(point);
  return xi;
}

GroundTruth MakeFixture(std::string name, std::vector<Twist> twists,
                        const Eigen::Vector3d& tool, FieldOfView fov) {
  GroundTruth gt;
  gt.name = std::move(name);
  gt.params.twists = std::move(twists);
  gt.params.zero_pose.translation = tool;
  gt.joint_limits.assign(gt.params.twists.size(), {-kJointExcursion, kJointExcursion});
  gt.fov = std::move(fov);
  gt.obs_variance = 1e-4;
  return gt;
}

FieldOfView LookingAt(const Eigen::Vector3d& camera, const Eigen::Vector3d& target,
                      double half_angle, double min_range, double max_range) {
  FieldOfView fov;
  fov.enabled = true;
  fov.camera_position = camera;
  fov.view_direction = (target - camera).normalized();
  fov.half_angle = half_angle;
  fov.min_range = min_range;
  fov.max_range = max_range;
  return fov;
}

// Three revolute joints about z in the z = 0 plane with link lengths
// 0.30, 0.25 and 0.15 m, stretched along +x at q = 0.
GroundTruth Planar3() {
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  return MakeFixture("planar3",
                     {RevoluteAt(z, {0.0, 0.0, 0.0}), RevoluteAt(z, {0.30, 0.0, 0.0}),
                      RevoluteAt(z, {0.55, 0.0, 0.0})},
                     {0.70, 0.0, 0.0},
                     LookingAt({0.45, 0.0, 1.2}, {0.45, 0.0, 0.0}, 45.0 * kDeg, 0.1, 3.0));
}

// Right arm with a three-axis shoulder at the origin, upper arm along +x,
// elbow at 0.30 m, forearm hanging down towards a pitch wrist 0.25 m below.
// The marker sits on a hand-held tool about 0.29 m past the wrist.
GroundTruth Arm6() {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  return MakeFixture("arm6",
                     {RevoluteAt(z, {0.0, 0.0, 0.0}), RevoluteAt(y, {0.0, 0.0, 0.0}),
                      RevoluteAt(x, {0.0, 0.0, 0.0}), RevoluteAt(y, {0.30, 0.0, 0.0}),
                      RevoluteAt(z, {0.30, 0.0, 0.0}), RevoluteAt(y, {0.30, 0.0, -0.25})},
                     {0.50, 0.08, -0.45},
                     LookingAt({0.15, 0.0, 0.45}, {0.40, 0.0, -0.35}, 65.0 * kDeg, 0.1, 3.0));
}

// Three-axis waist, two-axis shoulder girdle, three-axis shoulder, elbow,
// forearm roll and a two-axis wrist.
GroundTruth Arm12() {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d shoulder(0.0, -0.25, 0.45);
  const Eigen::Vector3d elbow(0.0, -0.25, 0.17);
  const Eigen::Vector3d wrist(0.25, -0.25, 0.17);
  return MakeFixture(
      "arm12",
      {RevoluteAt(z, {0.0, 0.0, 0.0}), RevoluteAt(y, {0.0, 0.0, 0.10}),
       RevoluteAt(x, {0.0, 0.0, 0.20}), RevoluteAt(x, {0.0, -0.10, 0.45}),
       RevoluteAt(z, {0.0, -0.15, 0.45}), RevoluteAt(y, shoulder), RevoluteAt(x, shoulder),
       RevoluteAt(z, shoulder), RevoluteAt(y, elbow), RevoluteAt(x, elbow),
       RevoluteAt(y, wrist), RevoluteAt(z, wrist)},
      {0.33, -0.20, 0.10},
      LookingAt({0.10, 0.0, 0.80}, {0.25, -0.25, 0.10}, 70.0 * kDeg, 0.1, 3.0));
}

double AngleBetween(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double PointLineDistance(const Eigen::Vector3d& point, const Eigen::Vector3d& line_point,
                         const Eigen::Vector3d& direction) {
  const Eigen::Vector3d d = direction.normalized();
  return (point - line_point).cross(d).norm();
}

}  // namespace

bool FieldOfView::Contains(const Eigen::Vector3d& point) const {
  if (!enabled) return true;
  const Eigen::Vector3d ray = point - camera_position;
  const double range = ray.norm();
  if (range < min_range || range > max_range) return false;
  return AngleBetween(ray, view_direction) < half_angle;
}

void GroundTruth::Validate() const {
  if (params.num_joints() < 1) throw std::invalid_argument("ground truth has no joints");
  if (static_cast<int>(joint_limits.size()) != params.num_joints()) {
    throw std::invalid_argument("ground truth needs one joint limit per joint");
  }
  for (const JointLimit& limit : joint_limits) {
    if (!(limit.lo <= limit.hi)) throw std::invalid_argument("joint limit with lo > hi");
  }
  for (const Twist& xi : params.twists) {
    if (!xi.IsFinite() || std::abs(xi.w.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("ground-truth twists must have unit w");
    }
  }
  if (!(obs_variance >= 0.0)) throw std::invalid_argument("obs_variance must be >= 0");
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed) {
  std::uint64_t state = seed;
  std::uint64_t mixed = SplitMix64(state);
  state ^= stream * 0xd1b54a32d192ed03ULL;
  mixed ^= SplitMix64(state);
  engine_.seed(mixed);
}

double SeededRng::Uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

double SeededRng::Normal() {
  return boost::random::normal_distribution<double>(0.0, 1.0)(engine_);
}

bool WithinLimits(const std::vector<JointLimit>& limits, const JointConfig& q) {
  if (static_cast<int>(limits.size()) != q.size()) return false;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!(q[i] >= limits[i].lo && q[i] <= limits[i].hi)) return false;
  }
  return true;
}

std::optional<Eigen::Vector3d> Measure(const GroundTruth& gt, const JointConfig& q,
                                       SeededRng& rng) {
  if (!WithinLimits(gt.joint_limits, q)) {
    throw std::invalid_argument("Measure: configuration outside joint limits");
  }
  const Eigen::Vector3d truth = Observe(gt.params, q);
  Eigen::Vector3d noise;
  for (int k = 0; k < 3; ++k) noise[k] = rng.Normal();
  if (!gt.fov.Contains(truth)) return std::nullopt;
  return truth + std::sqrt(gt.obs_variance) * noise;
}

JointConfig RandomConfig(const GroundTruth& gt, SeededRng& rng) {
  JointConfig q(gt.num_joints());
  for (int i = 0; i < gt.num_joints(); ++i) {
    q[i] = rng.Uniform(gt.joint_limits[i].lo, gt.joint_limits[i].hi);
  }
  return q;
}

std::vector<std::string> BuiltinChainNames() { return {"planar3", "arm6", "arm12"}; }

GroundTruth BuiltinChain(const std::string& name) {
  if (name == "planar3") return Planar3();
  if (name == "arm6") return Arm6();
  if (name == "arm12") return Arm12();
  throw std::invalid_argument("unknown built-in chain '" + name + "'");
}

double AxisLineDistance(const Eigen::Vector3d& p1, const Eigen::Vector3d& d1,
                        const Eigen::Vector3d& p2, const Eigen::Vector3d& d2) {
  const Eigen::Vector3d u1 = d1.normalized();
  const Eigen::Vector3d u2 = d2.normalized();
  const Eigen::Vector3d normal = u1.cross(u2);
  const double sine = normal.norm();
  if (sine < kParallelTolerance) {
    // Points on each line closest to the origin.
    const Eigen::Vector3d c1 = p1 - p1.dot(u1) * u1;
    const Eigen::Vector3d c2 = p2 - p2.dot(u2) * u2;
    return (c1 - c2).norm();
  }
  return std::abs((p2 - p1).dot(normal)) / sine;
}

ChainErrors Metrics(const Eigen::VectorXd& estimate, const GroundTruth& gt) {
  const int n = gt.num_joints();
  if (estimate.size() != kParamsPerJoint * n) {
    throw std::invalid_argument("Metrics: estimate does not match the chain");
  }
  const ChainParams est = gt.params.WithVector(estimate);

  std::vector<bool> degenerate(n, false);
  for (int i = 0; i < n; ++i) {
    if (est.twists[i].w.norm() == 0.0) {
      degenerate[i] = true;
      spdlog::debug("Metrics: joint {} has a zero-norm axis estimate", i);
    }
  }

  ChainErrors errors;
  if (n > 1) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (degenerate[i] || degenerate[j]) {
          sum += std::numbers::pi / 2.0;
          continue;
        }
        const double est_angle = AngleBetween(est.twists[i].w, est.twists[j].w);
        const double true_angle =
            AngleBetween(gt.params.twists[i].w, gt.params.twists[j].w);
        sum += std::abs(est_angle - true_angle);
      }
    }
    errors.orientation = sum / static_cast<double>(n * (n - 1));
  }

  double location = 0.0;
  for (int i = 0; i < n; ++i) {
    const Twist& truth = gt.params.twists[i];
    if (degenerate[i]) {
      location += PointLineDistance(est.twists[i].v, truth.AxisPoint(), truth.w);
    } else {
      location += AxisLineDistance(truth.AxisPoint(), truth.w, est.twists[i].AxisPoint(),
                                   est.twists[i].w);
    }
  }
  errors.location = location / n;
  return errors;
}

}  // namespace bodyschema
