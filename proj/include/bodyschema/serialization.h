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

// JSON documents shared by the library and the command-line tool. The
// schemas are described in docs/formats.md.

#ifndef BODYSCHEMA_SERIALIZATION_H_
#define BODYSCHEMA_SERIALIZATION_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "bodyschema/direct.h"
#include "bodyschema/estimator.h"
#include "bodyschema/experiment.h"
#include "bodyschema/sim.h"
#include "json.hpp"

namespace bodyschema {

// Thrown for malformed documents and unreadable files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json ChainToJson(const GroundTruth& gt);
GroundTruth ChainFromJson(const nlohmann::json& doc);
GroundTruth LoadChainFile(const std::string& path);
void SaveChainFile(const std::string& path, const GroundTruth& gt);

nlohmann::json SnapshotToJson(const EstimatorState& state);
EstimatorState SnapshotFromJson(const nlohmann::json& doc);

// One line per evaluation: {"eval": k, "point": [...], "value": f}.
void WriteTrace(std::ostream& out, const std::vector<DirectEvaluation>& trace);

nlohmann::json ConfigToJson(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ConfigFromJson(const nlohmann::json& doc);
ExperimentConfig LoadConfigFile(const std::string& path);
// Applies "dotted.key=value" to a config document. The value is parsed as
// JSON when possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json& doc, const std::string& assignment);

nlohmann::json RecordToJson(const ExperimentRecord& record);
ExperimentRecord RecordFromJson(const nlohmann::json& doc);

// Writes `path` (JSON lines), the CSV projection next to it and the
// observation log. Wall-clock timings go to a separate timing file so the
// other three stay byte-identical across reruns. Returns the written paths.
std::vector<std::string> WriteRecordFiles(const std::string& path,
                                          const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> ReadRecordFile(const std::string& path);

void WriteRecordsCsv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void WriteSummary(std::ostream& out, const std::vector<StrategySummary>& summaries);

}  // namespace bodyschema

#endif  // BODYSCHEMA_SERIALIZATION_H_
