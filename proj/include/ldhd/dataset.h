// Copyright 2026 The LDHD Toolkit Authors
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

// JSON Lines datasets, their manifests and per-scale scoring.
//
// Record line:  {"format_version":1,"task":..,"scale":..,"input":..,
//                "target":..,"latent":..}   ("latent" optional)
// Manifest:     {"format_version":1,"task":..,"scales":[..],"count":..,
//                "seed":..,"sampling":"up-to"|"exact","vocab":[..]}

#ifndef LDHD_DATASET_H_
#define LDHD_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldhd/tasks.h"

namespace ldhd::tasks {

inline constexpr int kFormatVersion = 1;

struct DatasetRecord {
  std::string task;
  int scale = 0;
  std::string input;
  std::string target;
  std::optional<std::string> latent;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

std::string RecordToJsonLine(const DatasetRecord& r);
// Throws ParseError on malformed JSON, unknown or missing fields, or a
// format_version other than kFormatVersion.
DatasetRecord RecordFromJsonLine(const std::string& line);

struct Manifest {
  TaskKind task = TaskKind::kUrfAddition;
  std::vector<int> scales;
  int64_t count = 0;  // records per entry of `scales`
  uint64_t seed = 0;
  ScaleMode sampling = ScaleMode::kUpTo;
  std::vector<std::string> vocab;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string ManifestToJson(const Manifest& m);
Manifest ManifestFromJson(const std::string& text);

struct EmitOptions {
  TaskKind task = TaskKind::kUrfAddition;
  std::vector<int> scales;  // one shard per entry, in order
  int64_t count = 0;        // per shard
  uint64_t seed = 0;
  ScaleMode sampling = ScaleMode::kUpTo;
  int width = 0;  // arf-add padding; 0 means the largest scale
  bool with_latent = true;
  int threads = 1;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  Manifest manifest;
};

// Shard s draws from Rng(seed, s); shards are concatenated in order, so the
// output does not depend on `threads`.
Dataset EmitDataset(const EmitOptions& options);

void WriteJsonl(std::ostream& out, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> ReadJsonl(std::istream& in);

// Throws Io when a file cannot be opened or written.
void WriteDatasetFiles(const std::string& jsonl_path, const std::string& manifest_path,
                       const Dataset& dataset);
// "train.jsonl" -> "train.manifest.json".
std::string DefaultManifestPath(const std::string& jsonl_path);

// Rebuilds the instance behind a record and reruns the format round trip.
bool VerifyRecord(const DatasetRecord& r);

struct ScaleScore {
  int scale = 0;
  int count = 0;
  int exact = 0;
  double exact_match = 0.0;
  std::vector<double> position_accuracy;  // over target tokens
  std::vector<int> position_count;
};

struct ScoreReport {
  std::vector<ScaleScore> scales;  // ascending scale
};

// predictions[i] is the predicted target text for records[i]. Throws
// DimensionMismatch when the lengths differ.
ScoreReport ScorePredictions(const std::vector<DatasetRecord>& records,
                             const std::vector<std::string>& predictions);
std::string ScoreReportToCsv(const ScoreReport& report);

}  // namespace ldhd::tasks

#endif  // LDHD_DATASET_H_
