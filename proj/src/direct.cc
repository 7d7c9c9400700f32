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

#include "bodyschema/direct.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bodyschema {

namespace {

// Cells whose longest side is 3^-kMaxLevel are not divided further.
constexpr int kMaxLevel = 30;
constexpr double kInf = std::numeric_limits<double>::infinity();

double ThirdPower(int level) { return std::pow(3.0, -level); }

struct MeasureClass {
  double measure = 0.0;
  double value = kInf;
  std::vector<int> members;  // indices attaining `value`, ascending
};

}  // namespace

double HyperRect::SideLength(int dim) const { return ThirdPower(levels[dim]); }

double HyperRect::Volume() const {
  double volume = 1.0;
  for (int level : levels) volume *= ThirdPower(level);
  return volume;
}

int HyperRect::MinLevel() const {
  return *std::min_element(levels.begin(), levels.end());
}

void HyperRect::UpdateMeasure() {
  std::vector<int> sorted = levels;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double sum = 0.0;
  for (int level : sorted) {
    const double side = ThirdPower(level);
    sum += side * side;
  }
  measure = 0.5 * std::sqrt(sum);
}

void DirectConfig::Validate() const {
  if (bounds.empty()) throw std::invalid_argument("DIRECT: dimension must be >= 1");
  if (max_evaluations < 1) throw std::invalid_argument("DIRECT: budget must be >= 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("DIRECT: epsilon must be >= 0");
  for (const Bound& b : bounds) {
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw std::invalid_argument("DIRECT: each bound needs finite lo < hi");
    }
  }
}

std::vector<int> PotentiallyOptimal(std::span<const HyperRect> rects, double f_min,
                                    double epsilon, DirectVariant variant) {
  if (rects.empty()) return {};

  std::map<double, MeasureClass> by_measure;
  for (int i = 0; i < static_cast<int>(rects.size()); ++i) {
    MeasureClass& cls = by_measure[rects[i].measure];
    cls.measure = rects[i].measure;
    const double value = rects[i].value;
    if (value < cls.value) {
      cls.value = value;
      cls.members.assign(1, i);
    } else if (value == cls.value && std::isfinite(value)) {
      cls.members.push_back(i);
    }
  }

  std::vector<MeasureClass> classes;
  for (auto& [measure, cls] : by_measure) {
    if (std::isfinite(cls.value)) classes.push_back(std::move(cls));
  }
  if (classes.empty()) {
    // Nothing finite yet: divide the largest cell.
    int pick = 0;
    for (int i = 1; i < static_cast<int>(rects.size()); ++i) {
      if (rects[i].measure > rects[pick].measure) pick = i;
    }
    return {pick};
  }

  const double guard = f_min - epsilon * std::abs(f_min);
  std::vector<int> selected;
  const int count = static_cast<int>(classes.size());
  for (int j = 0; j < count; ++j) {
    const double dj = classes[j].measure;
    const double fj = classes[j].value;
    double k_low = (fj - guard) / dj;
    for (int i = 0; i < j; ++i) {
      k_low = std::max(k_low, (fj - classes[i].value) / (dj - classes[i].measure));
    }
    double k_high = kInf;
    for (int i = j + 1; i < count; ++i) {
      k_high = std::min(k_high, (classes[i].value - fj) / (classes[i].measure - dj));
    }
    if (k_high > 0.0 && k_low <= k_high) {
      if (variant == DirectVariant::kDirectL) {
        selected.push_back(classes[j].members.front());
      } else {
        selected.insert(selected.end(), classes[j].members.begin(),
                        classes[j].members.end());
      }
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<HyperRect> Trisect(const HyperRect& rect, const CellEvaluator& evaluate) {
  const int dims = static_cast<int>(rect.levels.size());
  const int min_level = rect.MinLevel();
  const double offset = ThirdPower(min_level + 1);

  struct Candidate {
    int dim;
    double plus, minus;
    double best() const { return std::min(plus, minus); }
  };
  std::vector<Candidate> candidates;
  for (int d = 0; d < dims; ++d) {
    if (rect.levels[d] != min_level) continue;
    Eigen::VectorXd point = rect.center;
    point[d] += offset;
    const std::optional<double> plus = evaluate(point);
    if (!plus) break;
    point[d] = rect.center[d] - offset;
    const std::optional<double> minus = evaluate(point);
    if (!minus) break;
    candidates.push_back({d, *plus, *minus});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.best() < b.best(); });

  std::vector<HyperRect> children;
  children.reserve(2 * candidates.size() + 1);
  HyperRect middle = rect;
  children.push_back(middle);  // placeholder, overwritten below
  for (const Candidate& c : candidates) {
    middle.levels[c.dim] += 1;
    middle.UpdateMeasure();
    for (int sign : {+1, -1}) {
      HyperRect child = middle;
      child.center[c.dim] += sign * offset;
      child.value = sign > 0 ? c.plus : c.minus;
      children.push_back(std::move(child));
    }
  }
  children.front() = std::move(middle);
  return children;
}

DirectSearch::DirectSearch(Objective objective, DirectConfig cfg)
    : objective_(std::move(objective)), cfg_(std::move(cfg)) {
  cfg_.Validate();
  result_.best_value = kInf;
}

Eigen::VectorXd DirectSearch::ToOriginal(const Eigen::VectorXd& unit_point) const {
  Eigen::VectorXd x(unit_point.size());
  for (Eigen::Index i = 0; i < unit_point.size(); ++i) {
    const Bound& b = cfg_.bounds[i];
    x[i] = b.lo + unit_point[i] * (b.hi - b.lo);
  }
  return x;
}

bool DirectSearch::BudgetExhausted() const {
  return result_.evaluations_used >= cfg_.max_evaluations;
}

std::optional<double> DirectSearch::Evaluate(const Eigen::VectorXd& unit_point) {
  if (BudgetExhausted()) return std::nullopt;
  const Eigen::VectorXd x = ToOriginal(unit_point);
  double value = objective_(x);
  ++result_.evaluations_used;
  if (std::isnan(value)) {
    spdlog::warn("DIRECT: objective returned NaN, treating as +inf");
    value = kInf;
  }
  if (cfg_.record_trace) result_.trace.push_back({x, value});
  if (value < result_.best_value || result_.best_point.size() == 0) {
    result_.best_value = value;
    result_.best_point = x;
  }
  return value;
}

void DirectSearch::Initialize() {
  if (initialized_) return;
  initialized_ = true;
  const int dims = static_cast<int>(cfg_.bounds.size());
  HyperRect root;
  root.center = Eigen::VectorXd::Constant(dims, 0.5);
  root.levels.assign(dims, 0);
  root.UpdateMeasure();
  root.value = *Evaluate(root.center);
  rects_.push_back(std::move(root));
}

bool DirectSearch::Iterate() {
  Initialize();
  if (BudgetExhausted()) return false;

  std::vector<int> selection =
      PotentiallyOptimal(rects_, result_.best_value, cfg_.epsilon, cfg_.variant);
  std::erase_if(selection, [&](int i) { return rects_[i].MinLevel() >= kMaxLevel; });
  last_selection_ = selection;
  if (selection.empty()) return false;

  const CellEvaluator evaluate = [this](const Eigen::VectorXd& p) { return Evaluate(p); };
  for (int index : selection) {
    if (BudgetExhausted()) break;
    std::vector<HyperRect> children = Trisect(rects_[index], evaluate);
    rects_[index] = std::move(children.front());
    for (std::size_t c = 1; c < children.size(); ++c) {
      rects_.push_back(std::move(children[c]));
    }
  }
  ++result_.iterations;
  return true;
}

void DirectSearch::Run() {
  Initialize();
  while (Iterate()) {
  }
}

DirectResult Minimize(const Objective& objective, const DirectConfig& cfg) {
  DirectSearch search(objective, cfg);
  search.Run();
  return search.result();
}

}  // namespace bodyschema
