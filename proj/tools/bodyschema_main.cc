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

// Experiment harness.
//
//   bodyschema run --config cfg.json --strategy active_rls,random_rls \
//                  --seeds 1,2,3 --iterations 300 --out runs/planar3.jsonl
//   bodyschema summarize --in runs/planar3.jsonl
//   bodyschema fixtures [--dump NAME]
//
// Log verbosity follows BODYSCHEMA_LOG_LEVEL (trace, debug, info, warn,
// error, off; default warn).

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bodyschema/experiment.h"
#include "bodyschema/serialization.h"
#include "bodyschema/sim.h"

namespace {

using bodyschema::ExperimentConfig;
using bodyschema::ExperimentRecord;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void ConfigureLogging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("BODYSCHEMA_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

struct RunOptions {
  std::string config_path;
  std::string strategies;
  std::string seeds;
  int iterations = 0;
  std::string out;
  std::vector<std::string> overrides;
};

int Run(const RunOptions& opts) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opts.config_path.empty()) {
    doc = bodyschema::ConfigToJson(bodyschema::LoadConfigFile(opts.config_path));
  }
  for (const std::string& assignment : opts.overrides) {
    bodyschema::ApplyOverride(doc, assignment);
  }
  ExperimentConfig base = bodyschema::ConfigFromJson(doc);
  if (!opts.seeds.empty()) {
    base.seeds.clear();
    for (const std::string& s : SplitList(opts.seeds)) base.seeds.push_back(std::stoull(s));
  }
  if (opts.iterations > 0) base.iterations = opts.iterations;
  if (!opts.out.empty()) base.output = opts.out;
  if (base.output.empty()) throw std::invalid_argument("no output path (--out)");

  std::vector<bodyschema::Strategy> strategies = {base.strategy};
  if (!opts.strategies.empty()) {
    strategies.clear();
    for (const std::string& s : SplitList(opts.strategies)) {
      strategies.push_back(bodyschema::ParseStrategy(s));
    }
  }

  std::vector<ExperimentRecord> records;
  for (bodyschema::Strategy strategy : strategies) {
    ExperimentConfig cfg = base;
    cfg.strategy = strategy;
    std::vector<ExperimentRecord> part = bodyschema::RunExperiment(cfg);
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  for (const std::string& path : bodyschema::WriteRecordFiles(base.output, records)) {
    std::cout << "wrote " << path << "\n";
  }
  bodyschema::WriteSummary(std::cout, bodyschema::Summarize(records, base.orientation_threshold,
                                                            base.location_threshold));
  for (const ExperimentRecord& r : records) {
    if (r.failed) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Active body-schema learning experiments"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "run strategies over seeds and write records");
  run->add_option("--config", run_opts.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  run->add_option("--strategy", run_opts.strategies,
                  "comma-separated: random_rls, random_gradient, active_rls");
  run->add_option("--seeds", run_opts.seeds, "comma-separated 64-bit seeds");
  run->add_option("--iterations", run_opts.iterations, "observations per seed");
  run->add_option("--out", run_opts.out, "record file (JSON lines)");
  run->add_option("--override", run_opts.overrides, "config override key=value (repeatable)");

  std::string summary_in;
  double orientation_threshold = 0.05;
  double location_threshold = 0.02;
  CLI::App* summarize = app.add_subcommand("summarize", "aggregate a record file");
  summarize->add_option("--in", summary_in, "record file (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  summarize->add_option("--orientation-threshold", orientation_threshold, "radians");
  summarize->add_option("--location-threshold", location_threshold, "meters");

  std::string dump_name;
  CLI::App* fixtures = app.add_subcommand("fixtures", "list built-in chains");
  fixtures->add_option("--dump", dump_name, "print the chain document of a fixture");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return Run(run_opts);
    if (summarize->parsed()) {
      const auto records = bodyschema::ReadRecordFile(summary_in);
      bodyschema::WriteSummary(
          std::cout, bodyschema::Summarize(records, orientation_threshold, location_threshold));
      return 0;
    }
    if (fixtures->parsed()) {
      if (!dump_name.empty()) {
        std::cout << bodyschema::ChainToJson(bodyschema::BuiltinChain(dump_name)).dump(2)
                  << "\n";
        return 0;
      }
      for (const std::string& name : bodyschema::BuiltinChainNames()) {
        const bodyschema::GroundTruth gt = bodyschema::BuiltinChain(name);
        std::cout << name << "\t" << gt.num_joints() << " joints\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
