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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "test_util.h"

namespace bodyschema {
namespace {

constexpr double kPi = std::numbers::pi;

GroundTruth Planar() { return BuiltinChain("planar3"); }

TEST(SeededRngTest, SameSeedSameStream) {
  SeededRng a(42, 2), b(42, 2);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.Uniform(-1.0, 1.0), b.Uniform(-1.0, 1.0));
    ASSERT_EQ(a.Normal(), b.Normal());
  }
}

TEST(SeededRngTest, StreamsDiffer) {
  SeededRng a(42, 0), b(42, 1), c(43, 0);
  const double x = a.Uniform(0.0, 1.0);
  EXPECT_NE(x, b.Uniform(0.0, 1.0));
  EXPECT_NE(x, c.Uniform(0.0, 1.0));
}

TEST(SeededRngTest, UniformStaysInRange) {
  SeededRng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.Uniform(-0.3, 0.2);
    ASSERT_GE(x, -0.3);
    ASSERT_LT(x, 0.2);
  }
}

TEST(MeasureTest, NoiselessInsideFieldOfViewIsExact) {
  GroundTruth gt = Planar();
  gt.obs_variance = 0.0;
  SeededRng rng(1, 2);
  const JointConfig q = Eigen::Vector3d(0.1, -0.2, 0.3);
  const auto y = Measure(gt, q, rng);
  ASSERT_TRUE(y.has_value());
  EXPECT_EQ(*y, Observe(gt.params, q));
}

TEST(MeasureTest, ZeroHalfAngleIsAlwaysAbsent) {
  GroundTruth gt = Planar();
  gt.fov.half_angle = 0.0;
  SeededRng rng(1, 2), config_rng(1, 1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(Measure(gt, RandomConfig(gt, config_rng), rng).has_value());
  }
}

TEST(MeasureTest, SampleVarianceMatchesNoise) {
  GroundTruth gt = Planar();
  gt.obs_variance = 1e-4;
  SeededRng rng(3, 2);
  const JointConfig q = Eigen::Vector3d(0.2, 0.1, -0.1);
  const Eigen::Vector3d truth = Observe(gt.params, q);
  constexpr int kDraws = 100000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d sum_sq = Eigen::Vector3d::Zero();
  for (int i = 0; i < kDraws; ++i) {
    const Eigen::Vector3d e = *Measure(gt, q, rng) - truth;
    sum += e;
    sum_sq += e.cwiseProduct(e);
  }
  const Eigen::Vector3d mean = sum / kDraws;
  const Eigen::Vector3d variance = sum_sq / kDraws - mean.cwiseProduct(mean);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(variance[k], 1e-4, 0.05 * 1e-4) << "axis " << k;
  }
}

TEST(MeasureTest, OutsideLimitsThrows) {
  const GroundTruth gt = Planar();
  SeededRng rng(1);
  EXPECT_THROW(Measure(gt, Eigen::Vector3d(1.0, 0.0, 0.0), rng), std::invalid_argument);
  EXPECT_THROW(Measure(gt, Eigen::Vector2d(0.0, 0.0), rng), std::invalid_argument);
}

TEST(MeasureTest, DeterministicStream) {
  const GroundTruth gt = BuiltinChain("arm6");
  SeededRng a(9, 2), b(9, 2), qa(9, 1), qb(9, 1);
  for (int i = 0; i < 200; ++i) {
    const auto ya = Measure(gt, RandomConfig(gt, qa), a);
    const auto yb = Measure(gt, RandomConfig(gt, qb), b);
    ASSERT_EQ(ya.has_value(), yb.has_value());
    if (ya) ASSERT_EQ(*ya, *yb);
  }
}

// Absent exactly when the predicate rejects the true position.
TEST(MeasureTest, AbsentMatchesFieldOfViewPredicate) {
  for (const std::string& name : BuiltinChainNames()) {
    GroundTruth gt = BuiltinChain(name);
    gt.fov.half_angle *= 0.25;  // make rejections common
    SeededRng rng(5, 2), config_rng(5, 1);
    int absent = 0;
    for (int i = 0; i < 2000; ++i) {
      const JointConfig q = RandomConfig(gt, config_rng);
      const bool visible = gt.fov.Contains(Observe(gt.params, q));
      const auto y = Measure(gt, q, rng);
      ASSERT_EQ(y.has_value(), visible) << name << " draw " << i;
      absent += !visible;
    }
    EXPECT_GT(absent, 0) << name;
  }
}

TEST(FieldOfViewTest, SectorAndRange) {
  FieldOfView fov;
  fov.enabled = true;
  fov.camera_position = Eigen::Vector3d::Zero();
  fov.view_direction = Eigen::Vector3d::UnitX();
  fov.half_angle = kPi / 4;
  fov.min_range = 0.5;
  fov.max_range = 2.0;
  EXPECT_TRUE(fov.Contains({1.0, 0.0, 0.0}));
  EXPECT_TRUE(fov.Contains({1.0, 0.9, 0.0}));
  EXPECT_FALSE(fov.Contains({1.0, 1.1, 0.0}));
  EXPECT_FALSE(fov.Contains({0.3, 0.0, 0.0}));
  EXPECT_FALSE(fov.Contains({2.5, 0.0, 0.0}));
  EXPECT_FALSE(fov.Contains({-1.0, 0.0, 0.0}));
  fov.enabled = false;
  EXPECT_TRUE(fov.Contains({-1.0, 0.0, 0.0}));
}

TEST(RandomConfigTest, DegenerateLimitsGiveZero) {
  GroundTruth gt = Planar();
  gt.joint_limits.assign(3, JointLimit{0.0, 0.0});
  SeededRng rng(1, 1);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(RandomConfig(gt, rng).isZero(0.0));
}

TEST(RandomConfigTest, MeanIsMidpoint) {
  GroundTruth gt = Planar();
  gt.joint_limits = {{-0.5, 0.5}, {0.0, 1.0}, {1.0, 3.0}};
  SeededRng rng(11, 1);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const JointConfig q = RandomConfig(gt, rng);
    ASSERT_TRUE(WithinLimits(gt.joint_limits, q));
    sum += q;
  }
  const Eigen::Vector3d mean = sum / kDraws;
  // Within 1% of each interval width around the midpoint.
  EXPECT_NEAR(mean[0], 0.0, 0.01);
  EXPECT_NEAR(mean[1], 0.5, 0.01);
  EXPECT_NEAR(mean[2], 2.0, 0.02);
}

TEST(RandomConfigTest, SameSeedSameSequence) {
  const GroundTruth gt = BuiltinChain("arm12");
  SeededRng a(77, 1), b(77, 1);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(RandomConfig(gt, a), RandomConfig(gt, b));
}

TEST(BuiltinChainTest, Planar3HandComputation) {
  const GroundTruth gt = Planar();
  ASSERT_EQ(gt.num_joints(), 3);
  for (const Twist& xi : gt.params.twists) EXPECT_EQ(xi.w, Eigen::Vector3d::UnitZ());
  EXPECT_TRUE(Observe(gt.params, Eigen::Vector3d::Zero()).isApprox(Eigen::Vector3d(0.7, 0, 0)));
  EXPECT_LE((Observe(gt.params, Eigen::Vector3d(kPi / 2, 0, 0)) - Eigen::Vector3d(0, 0.7, 0))
                .norm(),
            1e-12);
  EXPECT_LE((Observe(gt.params, Eigen::Vector3d(0, kPi / 2, 0)) - Eigen::Vector3d(0.3, 0.4, 0))
                .norm(),
            1e-12);
  EXPECT_LE((Observe(gt.params, Eigen::Vector3d(0, 0, kPi / 2)) -
             Eigen::Vector3d(0.55, 0.15, 0))
                .norm(),
            1e-12);
  EXPECT_TRUE(gt.fov.Contains(Observe(gt.params, Eigen::Vector3d::Zero())));
}

TEST(BuiltinChainTest, JointCountsAndValidity) {
  EXPECT_EQ(BuiltinChain("arm6").num_joints(), 6);
  EXPECT_EQ(BuiltinChain("arm12").num_joints(), 12);
  for (const std::string& name : BuiltinChainNames()) {
    const GroundTruth gt = BuiltinChain(name);
    EXPECT_NO_THROW(gt.Validate()) << name;
    EXPECT_EQ(gt.name, name);
    for (const JointLimit& limit : gt.joint_limits) {
      EXPECT_NEAR(limit.lo, -40.0 * kPi / 180.0, 1e-15);
      EXPECT_NEAR(limit.hi, 40.0 * kPi / 180.0, 1e-15);
    }
  }
  EXPECT_THROW(BuiltinChain("arm7"), std::invalid_argument);
}

TEST(BuiltinChainTest, Arm6StaysWithinReach) {
  const GroundTruth gt = BuiltinChain("arm6");
  SeededRng rng(13, 1);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_LE(Observe(gt.params, RandomConfig(gt, rng)).norm(), 1.2);
  }
}

TEST(BuiltinChainTest, MostRandomConfigsAreVisible) {
  for (const std::string& name : BuiltinChainNames()) {
    const GroundTruth gt = BuiltinChain(name);
    SeededRng rng(17, 1);
    int visible = 0;
    for (int i = 0; i < 2000; ++i) visible += gt.fov.Contains(Observe(gt.params, RandomConfig(gt, rng)));
    EXPECT_GE(visible, 1800) << name;
  }
}

TEST(GroundTruthTest, ValidateRejectsBadFixtures) {
  GroundTruth gt = Planar();
  gt.params.twists[1].w *= 1.5;
  EXPECT_THROW(gt.Validate(), std::invalid_argument);
  gt = Planar();
  gt.joint_limits[0] = {0.3, -0.3};
  EXPECT_THROW(gt.Validate(), std::invalid_argument);
  gt = Planar();
  gt.joint_limits.pop_back();
  EXPECT_THROW(gt.Validate(), std::invalid_argument);
}

TEST(AxisLineDistanceTest, Cases) {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX(), y = Eigen::Vector3d::UnitY();
  EXPECT_NEAR(AxisLineDistance({0, 0, 0}, x, {0, 0, 1}, y), 1.0, 1e-15);
  EXPECT_NEAR(AxisLineDistance({0, 0, 0}, x, {5, 0, 0}, y), 0.0, 1e-15);
  EXPECT_NEAR(AxisLineDistance({0, 0, 0}, x, {3, 0.3, 0}, -2.0 * x), 0.3, 1e-15);
  EXPECT_NEAR(AxisLineDistance({1, 0.3, 0.4}, x, {-2, 0, 0}, x), 0.5, 1e-15);
}

TEST(MetricsTest, TruthIsExactlyZero) {
  for (const std::string& name : BuiltinChainNames()) {
    const GroundTruth gt = BuiltinChain(name);
    const ChainErrors e = Metrics(gt.params.ToVector(), gt);
    EXPECT_EQ(e.orientation, 0.0) << name;
    EXPECT_EQ(e.location, 0.0) << name;
  }
}

TEST(MetricsTest, AxisScalingLeavesOrientationUnchanged) {
  const GroundTruth gt = BuiltinChain("arm6");
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> scale(0.3, 3.0);
  Eigen::VectorXd estimate = gt.params.ToVector();
  for (int j = 0; j < gt.num_joints(); ++j) {
    estimate.segment<3>(6 * j) *= scale(gen);
  }
  EXPECT_NEAR(Metrics(estimate, gt).orientation, 0.0, 1e-12);

  // Doubling w with v fixed halves the axis point w x v / |w|^2.
  Eigen::VectorXd doubled = gt.params.ToVector();
  double expected_location = 0.0;
  for (int j = 0; j < gt.num_joints(); ++j) {
    doubled.segment<3>(6 * j) *= 2.0;
    expected_location += 0.5 * gt.params.twists[j].AxisPoint().norm();
  }
  const ChainErrors e = Metrics(doubled, gt);
  EXPECT_NEAR(e.orientation, 0.0, 1e-12);
  EXPECT_NEAR(e.location, expected_location / gt.num_joints(), 1e-12);
}

// Independent recomputation: acos angles and closest points from the 2 x 2
// normal equations of the two lines.
TEST(MetricsTest, MatchesBruteForceRecomputation) {
  const GroundTruth gt = BuiltinChain("arm12");
  std::mt19937_64 gen(23);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd estimate = gt.params.ToVector();
    for (int i = 0; i < estimate.size(); ++i) estimate[i] += noise(gen);
    const ChainParams est = gt.params.WithVector(estimate);
    const int n = gt.num_joints();
    auto angle = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
      return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
    };
    double orientation = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        orientation += std::abs(angle(est.twists[i].w, est.twists[j].w) -
                                angle(gt.params.twists[i].w, gt.params.twists[j].w));
      }
    }
    orientation /= n * (n - 1);
    double location = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector3d p1 = gt.params.twists[i].AxisPoint(), d1 = gt.params.twists[i].w;
      const Eigen::Vector3d p2 = est.twists[i].AxisPoint(), d2 = est.twists[i].w;
      Eigen::Matrix2d a;
      a << d1.dot(d1), -d1.dot(d2), -d1.dot(d2), d2.dot(d2);
      const Eigen::Vector2d b(d1.dot(p2 - p1), -d2.dot(p2 - p1));
      const Eigen::Vector2d st = a.fullPivLu().solve(b);
      location += ((p1 + st[0] * d1) - (p2 + st[1] * d2)).norm();
    }
    location /= n;
    const ChainErrors e = Metrics(estimate, gt);
    EXPECT_NEAR(e.orientation, orientation, 1e-7) << "trial " << trial;
    EXPECT_NEAR(e.location, location, 1e-9) << "trial " << trial;
  }
}

TEST(MetricsTest, ZeroAxisEstimateIsMaximallyAmbiguous) {
  const GroundTruth gt = Planar();
  Eigen::VectorXd estimate = gt.params.ToVector();
  estimate.segment<3>(6).setZero();  // joint 1
  const ChainErrors e = Metrics(estimate, gt);
  // Four of the six ordered pairs involve joint 1; the rest are exact.
  EXPECT_NEAR(e.orientation, 4.0 * (kPi / 2) / 6.0, 1e-15);
  EXPECT_TRUE(std::isfinite(e.location));
}

TEST(MetricsTest, SingleJointHasNoOrientationPairs) {
  GroundTruth gt = Planar();
  gt.params.twists.resize(1);
  gt.joint_limits.resize(1);
  Eigen::VectorXd estimate = gt.params.ToVector();
  estimate[0] = 0.3;
  EXPECT_EQ(Metrics(estimate, gt).orientation, 0.0);
}

TEST(MetricsTest, WrongSizeThrows) {
  EXPECT_THROW(Metrics(Eigen::VectorXd::Zero(5), Planar()), std::invalid_argument);
}

}  // namespace
}  // namespace bodyschema
