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

#include "bodyschema/serialization.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace bodyschema {

namespace {

using nlohmann::json;

json VectorToJson(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd VectorFromJson(const json& arr, const std::string& what,
                               Eigen::Index expected = -1) {
  if (!arr.is_array()) throw FormatError(what + " must be an array of numbers");
  if (expected >= 0 && static_cast<Eigen::Index>(arr.size()) != expected) {
    throw FormatError(what + " must have " + std::to_string(expected) + " entries");
  }
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw FormatError(what + " must contain only numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

void RejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw FormatError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void ReadIfPresent(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string VariantName(DirectVariant variant) {
  return variant == DirectVariant::kDirect ? "direct" : "direct_l";
}

DirectVariant ParseVariant(const std::string& name) {
  if (name == "direct") return DirectVariant::kDirect;
  if (name == "direct_l") return DirectVariant::kDirectL;
  throw FormatError("unknown optimizer variant '" + name + "'");
}

std::string CsvNumber(const std::optional<double>& value) {
  return value ? fmt::format("{}", *value) : std::string();
}

// "runs/out.jsonl" -> "runs/out"; other names are used as-is.
std::string StripJsonl(const std::string& path) {
  const std::string suffix = ".jsonl";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

}  // namespace

json ChainToJson(const GroundTruth& gt) {
  json doc;
  doc["name"] = gt.name;
  json twists = json::array();
  for (const Twist& xi : gt.params.twists) {
    twists.push_back({xi.w.x(), xi.w.y(), xi.w.z(), xi.v.x(), xi.v.y(), xi.v.z()});
  }
  doc["twists"] = twists;
  json pose = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.push_back(gt.params.zero_pose.rotation(r, c));
  }
  for (int k = 0; k < 3; ++k) pose.push_back(gt.params.zero_pose.translation[k]);
  doc["zero_pose"] = pose;
  json limits = json::array();
  for (const JointLimit& l : gt.joint_limits) limits.push_back({l.lo, l.hi});
  doc["joint_limits"] = limits;
  doc["fov"] = {{"enabled", gt.fov.enabled},
                {"camera_position", VectorToJson(gt.fov.camera_position)},
                {"view_direction", VectorToJson(gt.fov.view_direction)},
                {"half_angle", gt.fov.half_angle},
                {"min_range", gt.fov.min_range},
                {"max_range", gt.fov.max_range}};
  doc["obs_variance"] = gt.obs_variance;
  return doc;
}

GroundTruth ChainFromJson(const json& doc) {
  RejectUnknownKeys(doc, {"name", "twists", "zero_pose", "joint_limits", "fov", "obs_variance"},
                    "chain");
  GroundTruth gt;
  ReadIfPresent(doc, "name", gt.name);
  if (!doc.contains("twists") || !doc["twists"].is_array() || doc["twists"].empty()) {
    throw FormatError("chain needs a non-empty 'twists' array");
  }
  for (const json& entry : doc["twists"]) {
    const Eigen::VectorXd t = VectorFromJson(entry, "twist", 6);
    Twist xi;
    xi.w = t.head<3>();
    xi.v = t.tail<3>();
    gt.params.twists.push_back(xi);
  }
  if (!doc.contains("zero_pose")) throw FormatError("chain needs 'zero_pose'");
  const Eigen::VectorXd pose = VectorFromJson(doc["zero_pose"], "zero_pose", 12);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) gt.params.zero_pose.rotation(r, c) = pose[3 * r + c];
  }
  gt.params.zero_pose.translation = pose.tail<3>();
  const Eigen::Matrix3d& rot = gt.params.zero_pose.rotation;
  if (!(rot.transpose() * rot - Eigen::Matrix3d::Identity()).isZero(1e-9) ||
      std::abs(rot.determinant() - 1.0) > 1e-9) {
    throw FormatError("zero_pose rotation is not a proper rotation");
  }

  if (doc.contains("joint_limits")) {
    for (const json& entry : doc["joint_limits"]) {
      const Eigen::VectorXd l = VectorFromJson(entry, "joint limit", 2);
      gt.joint_limits.push_back({l[0], l[1]});
    }
  } else {
    const double excursion = 40.0 * std::numbers::pi / 180.0;
    gt.joint_limits.assign(gt.params.twists.size(), {-excursion, excursion});
  }
  if (doc.contains("fov")) {
    const json& f = doc["fov"];
    RejectUnknownKeys(f, {"enabled", "camera_position", "view_direction", "half_angle",
                          "min_range", "max_range"},
                      "fov");
    ReadIfPresent(f, "enabled", gt.fov.enabled);
    if (f.contains("camera_position")) {
      gt.fov.camera_position = VectorFromJson(f["camera_position"], "camera_position", 3);
    }
    if (f.contains("view_direction")) {
      gt.fov.view_direction =
          VectorFromJson(f["view_direction"], "view_direction", 3).normalized();
    }
    ReadIfPresent(f, "half_angle", gt.fov.half_angle);
    ReadIfPresent(f, "min_range", gt.fov.min_range);
    ReadIfPresent(f, "max_range", gt.fov.max_range);
  }
  ReadIfPresent(doc, "obs_variance", gt.obs_variance);
  try {
    gt.Validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return gt;
}

GroundTruth LoadChainFile(const std::string& path) { return ChainFromJson(ReadJsonFile(path)); }

void SaveChainFile(const std::string& path, const GroundTruth& gt) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << ChainToJson(gt).dump(2) << "\n";
}

json SnapshotToJson(const EstimatorState& state) {
  json cov = json::array();
  for (Eigen::Index r = 0; r < state.covariance.rows(); ++r) {
    cov.push_back(VectorToJson(state.covariance.row(r).transpose()));
  }
  return {{"mean", VectorToJson(state.mean)}, {"covariance", cov}};
}

EstimatorState SnapshotFromJson(const json& doc) {
  RejectUnknownKeys(doc, {"mean", "covariance"}, "snapshot");
  if (!doc.contains("mean") || !doc.contains("covariance")) {
    throw FormatError("snapshot needs 'mean' and 'covariance'");
  }
  EstimatorState state;
  state.mean = VectorFromJson(doc["mean"], "mean");
  const json& cov = doc["covariance"];
  if (!cov.is_array() || static_cast<Eigen::Index>(cov.size()) != state.mean.size()) {
    throw FormatError("covariance must be a square matrix matching the mean");
  }
  state.covariance.resize(state.mean.size(), state.mean.size());
  for (std::size_t r = 0; r < cov.size(); ++r) {
    state.covariance.row(static_cast<Eigen::Index>(r)) =
        VectorFromJson(cov[r], "covariance row", state.mean.size()).transpose();
  }
  return state;
}

void WriteTrace(std::ostream& out, const std::vector<DirectEvaluation>& trace) {
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << json{{"eval", k}, {"point", VectorToJson(trace[k].point)}, {"value", trace[k].value}}
               .dump()
        << "\n";
  }
}

json ConfigToJson(const ExperimentConfig& cfg) {
  json doc;
  doc["chain"] = cfg.chain;
  doc["strategy"] = StrategyName(cfg.strategy);
  doc["iterations"] = cfg.iterations;
  doc["seeds"] = cfg.seeds;
  doc["noise"] = {{"obs_variance", cfg.noise.obs_variance},
                  {"stabilizing_variance", cfg.noise.stabilizing_variance},
                  {"state_noise_variance", cfg.noise.state_noise_variance},
                  {"stabilizing_period", cfg.noise.stabilizing_period}};
  doc["gradient"] = {{"learning_rate", cfg.gradient.learning_rate},
                     {"decay", cfg.gradient.decay}};
  doc["optimizer"] = {{"max_evaluations", cfg.optimizer.max_evaluations},
                      {"epsilon", cfg.optimizer.epsilon},
                      {"variant", VariantName(cfg.optimizer.variant)}};
  doc["prior_variance"] = cfg.prior_variance;
  json init = {{"w_spread", cfg.init.w_spread}, {"v_spread", cfg.init.v_spread}};
  if (!cfg.init.bounds.empty()) {
    json bounds = json::array();
    for (const Bound& b : cfg.init.bounds) bounds.push_back({b.lo, b.hi});
    init["bounds"] = bounds;
  }
  doc["init_hypercube"] = init;
  doc["probe_set_size"] = cfg.probe_set_size;
  doc["probe_seed"] = cfg.probe_seed;
  doc["orientation_threshold"] = cfg.orientation_threshold;
  doc["location_threshold"] = cfg.location_threshold;
  doc["jacobian"] = cfg.jacobian == JacobianMethod::kAnalytic ? "analytic" : "finite_difference";
  doc["output"] = cfg.output;
  return doc;
}

ExperimentConfig ConfigFromJson(const json& doc) {
  RejectUnknownKeys(doc,
                    {"chain", "strategy", "iterations", "seeds", "noise", "gradient",
                     "optimizer", "prior_variance", "init_hypercube", "probe_set_size",
                     "probe_seed", "orientation_threshold", "location_threshold", "jacobian",
                     "output"},
                    "config");
  ExperimentConfig cfg;
  ReadIfPresent(doc, "chain", cfg.chain);
  if (doc.contains("strategy")) {
    try {
      cfg.strategy = ParseStrategy(doc["strategy"].get<std::string>());
    } catch (const std::exception& e) {
      throw FormatError(e.what());
    }
  }
  ReadIfPresent(doc, "iterations", cfg.iterations);
  ReadIfPresent(doc, "seeds", cfg.seeds);
  if (doc.contains("noise")) {
    const json& n = doc["noise"];
    RejectUnknownKeys(n, {"obs_variance", "stabilizing_variance", "state_noise_variance",
                          "stabilizing_period"},
                      "noise");
    ReadIfPresent(n, "obs_variance", cfg.noise.obs_variance);
    ReadIfPresent(n, "stabilizing_variance", cfg.noise.stabilizing_variance);
    ReadIfPresent(n, "state_noise_variance", cfg.noise.state_noise_variance);
    ReadIfPresent(n, "stabilizing_period", cfg.noise.stabilizing_period);
  }
  if (doc.contains("gradient")) {
    const json& g = doc["gradient"];
    RejectUnknownKeys(g, {"learning_rate", "decay"}, "gradient");
    ReadIfPresent(g, "learning_rate", cfg.gradient.learning_rate);
    ReadIfPresent(g, "decay", cfg.gradient.decay);
  }
  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    RejectUnknownKeys(o, {"max_evaluations", "epsilon", "variant"}, "optimizer");
    ReadIfPresent(o, "max_evaluations", cfg.optimizer.max_evaluations);
    ReadIfPresent(o, "epsilon", cfg.optimizer.epsilon);
    if (o.contains("variant")) cfg.optimizer.variant = ParseVariant(o["variant"].get<std::string>());
  }
  ReadIfPresent(doc, "prior_variance", cfg.prior_variance);
  if (doc.contains("init_hypercube")) {
    const json& h = doc["init_hypercube"];
    RejectUnknownKeys(h, {"w_spread", "v_spread", "bounds"}, "init_hypercube");
    ReadIfPresent(h, "w_spread", cfg.init.w_spread);
    ReadIfPresent(h, "v_spread", cfg.init.v_spread);
    if (h.contains("bounds")) {
      for (const json& entry : h["bounds"]) {
        const Eigen::VectorXd b = VectorFromJson(entry, "init bound", 2);
        cfg.init.bounds.push_back({b[0], b[1]});
      }
    }
  }
  ReadIfPresent(doc, "probe_set_size", cfg.probe_set_size);
  ReadIfPresent(doc, "probe_seed", cfg.probe_seed);
  ReadIfPresent(doc, "orientation_threshold", cfg.orientation_threshold);
  ReadIfPresent(doc, "location_threshold", cfg.location_threshold);
  if (doc.contains("jacobian")) {
    const std::string method = doc["jacobian"].get<std::string>();
    if (method == "analytic") {
      cfg.jacobian = JacobianMethod::kAnalytic;
    } else if (method == "finite_difference") {
      cfg.jacobian = JacobianMethod::kFiniteDifference;
    } else {
      throw FormatError("unknown jacobian method '" + method + "'");
    }
  }
  ReadIfPresent(doc, "output", cfg.output);
  return cfg;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  return ConfigFromJson(ReadJsonFile(path));
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw FormatError("override '" + assignment + "' is not of the form key=value");
  }
  std::string pointer = "/" + assignment.substr(0, eq);
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  doc[json::json_pointer(pointer)] = value;
}

json RecordToJson(const ExperimentRecord& r) {
  json doc = {{"strategy", r.strategy}, {"seed", r.seed}, {"iteration", r.iteration}};
  if (r.failed) {
    doc["failed"] = true;
    doc["error"] = r.error;
    return doc;
  }
  doc["orientation_error"] = r.orientation_error;
  doc["location_error"] = r.location_error;
  doc["prediction_error"] = r.prediction_error;
  doc["cost"] = r.cost ? json(*r.cost) : json(nullptr);
  doc["evaluations"] = r.evaluations ? json(*r.evaluations) : json(nullptr);
  doc["fov_rejections"] = r.fov_rejections;
  return doc;
}

ExperimentRecord RecordFromJson(const json& doc) {
  ExperimentRecord r;
  try {
    r.strategy = doc.at("strategy").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.iteration = doc.at("iteration").get<int>();
    if (doc.value("failed", false)) {
      r.failed = true;
      r.error = doc.value("error", "");
      return r;
    }
    r.orientation_error = doc.at("orientation_error").get<double>();
    r.location_error = doc.at("location_error").get<double>();
    r.prediction_error = doc.at("prediction_error").get<double>();
    if (doc.contains("cost") && !doc["cost"].is_null()) r.cost = doc["cost"].get<double>();
    if (doc.contains("evaluations") && !doc["evaluations"].is_null()) {
      r.evaluations = doc["evaluations"].get<int>();
    }
    r.fov_rejections = doc.value("fov_rejections", 0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed record: ") + e.what());
  }
  return r;
}

void WriteRecordsCsv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "strategy,seed,iteration,orientation_error,location_error,prediction_error,cost,"
         "evaluations,fov_rejections,failed\n";
  for (const ExperimentRecord& r : records) {
    out << r.strategy << ',' << r.seed << ',' << r.iteration << ',';
    if (r.failed) {
      out << ",,,,,," << "1\n";
      continue;
    }
    out << fmt::format("{},{},{},", r.orientation_error, r.location_error, r.prediction_error)
        << CsvNumber(r.cost) << ','
        << (r.evaluations ? std::to_string(*r.evaluations) : std::string()) << ','
        << r.fov_rejections << ",0\n";
  }
}

std::vector<std::string> WriteRecordFiles(const std::string& path,
                                          const std::vector<ExperimentRecord>& records) {
  const std::string base = StripJsonl(path);
  const std::string csv_path = base + ".csv";
  const std::string obs_path = base + ".observations.jsonl";
  const std::string timing_path = base + ".timing.jsonl";

  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream jsonl(path), csv(csv_path), obs(obs_path), timing(timing_path);
  if (!jsonl || !csv || !obs || !timing) {
    throw FormatError("cannot write record files next to '" + path + "'");
  }
  for (const ExperimentRecord& r : records) {
    jsonl << RecordToJson(r).dump() << "\n";
    if (r.failed) continue;
    const json key = {{"strategy", r.strategy}, {"seed", r.seed}, {"iteration", r.iteration}};
    json line = key;
    line["q"] = VectorToJson(r.config);
    line["y"] = r.observation ? VectorToJson(*r.observation) : json(nullptr);
    line["accepted"] = r.observation.has_value();
    obs << line.dump() << "\n";
    if (r.selection_seconds) {
      json t = key;
      t["selection_seconds"] = *r.selection_seconds;
      timing << t.dump() << "\n";
    }
  }
  WriteRecordsCsv(csv, records);
  return {path, csv_path, obs_path, timing_path};
}

std::vector<ExperimentRecord> ReadRecordFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<ExperimentRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      throw FormatError(path + ":" + std::to_string(line_number) + ": invalid JSON");
    }
    records.push_back(RecordFromJson(doc));
  }
  return records;
}

void WriteSummary(std::ostream& out, const std::vector<StrategySummary>& summaries) {
  out << fmt::format("{:<16} {:>5} {:>6} {:>9} {:>21} {:>9} {:>21} {:>12} {:>12} {:>12}\n",
                     "strategy", "seeds", "failed", "ori_hit", "ori_iters med [IQR]",
                     "loc_hit", "loc_iters med [IQR]", "final_ori", "final_loc",
                     "final_pred");
  for (const StrategySummary& s : summaries) {
    out << fmt::format(
        "{:<16} {:>5} {:>6} {:>9} {:>21} {:>9} {:>21} {:>12.5f} {:>12.5f} {:>12.5f}\n",
        s.strategy, s.seeds, s.failed_seeds, s.orientation_reached,
        fmt::format("{:.1f} [{:.1f}]", s.orientation_iterations.median,
                    s.orientation_iterations.iqr()),
        s.location_reached,
        fmt::format("{:.1f} [{:.1f}]", s.location_iterations.median,
                    s.location_iterations.iqr()),
        s.final_orientation.median, s.final_location.median, s.final_prediction.median);
  }
}

}  // namespace bodyschema
