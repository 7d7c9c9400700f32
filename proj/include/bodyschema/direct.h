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

// DIRECT (DIviding RECTangles) global minimization over a box, after
// Jones, Perttunen and Stuckman (1993), with the locally biased DIRECT-l
// selection of Gablonsky and Kelley (2001).
//
// The search runs in the unit cube; points are mapped affinely to the
// user bounds before every evaluation. Each cell is a hyperrectangle whose
// side lengths are powers of 1/3. An iteration selects the potentially
// optimal cells (lower convex hull of (measure, value) plus the epsilon
// improvement guard) and trisects each one along its longest sides.

#ifndef BODYSCHEMA_DIRECT_H_
#define BODYSCHEMA_DIRECT_H_

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace bodyschema {

// A search cell in unit-cube coordinates. Side length along dimension i is
// 3^-levels[i]; `measure` is the center-to-corner distance.
struct HyperRect {
  Eigen::VectorXd center;
  std::vector<int> levels;
  double value = 0.0;
  double measure = 0.0;

  double SideLength(int dim) const;
  double Volume() const;
  int MinLevel() const;
  // Recomputes `measure` from `levels` in a canonical order so that equal
  // level multisets give bitwise equal measures.
  void UpdateMeasure();
};

enum class DirectVariant { kDirect, kDirectL };

struct Bound {
  double lo = 0.0;
  double hi = 1.0;
};

struct DirectConfig {
  int max_evaluations = 200;
  double epsilon = 1e-4;
  DirectVariant variant = DirectVariant::kDirectL;
  std::vector<Bound> bounds;
  bool record_trace = false;

  // Throws std::invalid_argument on an empty or degenerate box or a budget < 1.
  void Validate() const;
};

struct DirectEvaluation {
  Eigen::VectorXd point;  // original coordinates
  double value = 0.0;
};

struct DirectResult {
  Eigen::VectorXd best_point;
  double best_value = 0.0;
  int evaluations_used = 0;
  int iterations = 0;
  std::vector<DirectEvaluation> trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Indices of potentially optimal rectangles, ascending. A rectangle j is
// selected when some K > 0 makes f_j - K d_j a lower bound for every cell
// and f_j - K d_j <= f_min - epsilon |f_min|. With kDirectL at most one
// rectangle per measure class is returned (lowest value, then lowest index).
// Cells with a non-finite value are never selected unless no finite value
// exists, in which case the lowest-index largest cell is returned.
std::vector<int> PotentiallyOptimal(std::span<const HyperRect> rects, double f_min,
                                    double epsilon, DirectVariant variant);

// Returns the value at a unit-cube point, or nullopt once the budget is spent.
using CellEvaluator = std::function<std::optional<double>(const Eigen::VectorXd&)>;

// Trisects `rect` along all of its longest sides. Candidate centers
// c +/- (side / 3) e_i are evaluated for every longest dimension first (in
// dimension order), then dimensions are split in increasing order of
// min(f(c + d e_i), f(c - d e_i)) so the best values land in the largest
// children. The first element returned is the shrunken center cell, followed
// by the (+, -) pair of each split dimension. Dimensions whose candidates
// could not both be evaluated are left unsplit.
std::vector<HyperRect> Trisect(const HyperRect& rect, const CellEvaluator& evaluate);

// Stepwise DIRECT driver; exposes the cell list between iterations.
class DirectSearch {
 public:
  DirectSearch(Objective objective, DirectConfig cfg);

  // Evaluates the center of the box. Called implicitly by Iterate().
  void Initialize();
  // One select-and-divide sweep. Returns false when the budget is exhausted
  // or no cell can be divided further.
  bool Iterate();
  void Run();

  const std::vector<HyperRect>& rects() const { return rects_; }
  const std::vector<int>& last_selection() const { return last_selection_; }
  const DirectResult& result() const { return result_; }
  bool BudgetExhausted() const;
  Eigen::VectorXd ToOriginal(const Eigen::VectorXd& unit_point) const;

 private:
  std::optional<double> Evaluate(const Eigen::VectorXd& unit_point);

  Objective objective_;
  DirectConfig cfg_;
  std::vector<HyperRect> rects_;
  std::vector<int> last_selection_;
  DirectResult result_;
  bool initialized_ = false;
};

DirectResult Minimize(const Objective& objective, const DirectConfig& cfg);

}  // namespace bodyschema

#endif  // BODYSCHEMA_DIRECT_H_
