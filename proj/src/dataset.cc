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

#include "ldhd/dataset.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace ldhd::tasks {

namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& what) { throw Error(ErrorCode::kParseError, what); }

json ParseObject(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) Fail("expected a JSON object");
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion) {
    Fail("unsupported or missing format_version");
  }
  return j;
}

void CheckKeys(const json& j, const std::set<std::string>& required,
               const std::set<std::string>& optional) {
  for (const std::string& k : required) {
    if (!j.contains(k)) Fail("missing field '" + k + "'");
  }
  for (const auto& [k, v] : j.items()) {
    if (k != "format_version" && !required.count(k) && !optional.count(k)) {
      Fail("unknown field '" + k + "'");
    }
  }
}

template <typename T>
T Get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    Fail(std::string("field '") + key + "' has the wrong type");
  }
}

std::string SamplingName(ScaleMode m) { return m == ScaleMode::kUpTo ? "up-to" : "exact"; }

}  // namespace

std::string RecordToJsonLine(const DatasetRecord& r) {
  json j = {{"format_version", kFormatVersion},
            {"task", r.task},
            {"scale", r.scale},
            {"input", r.input},
            {"target", r.target}};
  if (r.latent) j["latent"] = *r.latent;
  return j.dump();
}

DatasetRecord RecordFromJsonLine(const std::string& line) {
  const json j = ParseObject(line);
  CheckKeys(j, {"task", "scale", "input", "target"}, {"latent"});
  DatasetRecord r;
  r.task = Get<std::string>(j, "task");
  r.scale = Get<int>(j, "scale");
  r.input = Get<std::string>(j, "input");
  r.target = Get<std::string>(j, "target");
  if (j.contains("latent")) r.latent = Get<std::string>(j, "latent");
  return r;
}

std::string ManifestToJson(const Manifest& m) {
  const json j = {{"format_version", kFormatVersion},
                  {"task", TaskName(m.task)},
                  {"scales", m.scales},
                  {"count", m.count},
                  {"seed", m.seed},
                  {"sampling", SamplingName(m.sampling)},
                  {"vocab", m.vocab}};
  return j.dump(2) + "\n";
}

Manifest ManifestFromJson(const std::string& text) {
  const json j = ParseObject(text);
  CheckKeys(j, {"task", "scales", "count", "seed", "vocab"}, {"sampling"});
  Manifest m;
  try {
    m.task = ParseTaskKind(Get<std::string>(j, "task"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Fail(e.what());
  }
  m.scales = Get<std::vector<int>>(j, "scales");
  m.count = Get<int64_t>(j, "count");
  m.seed = Get<uint64_t>(j, "seed");
  m.vocab = Get<std::vector<std::string>>(j, "vocab");
  if (j.contains("sampling")) {
    const std::string s = Get<std::string>(j, "sampling");
    if (s == "up-to") {
      m.sampling = ScaleMode::kUpTo;
    } else if (s == "exact") {
      m.sampling = ScaleMode::kExact;
    } else {
      Fail("unknown sampling '" + s + "'");
    }
  }
  return m;
}

Dataset EmitDataset(const EmitOptions& options) {
  if (options.scales.empty()) throw Error(ErrorCode::kInvalidScale, "no scales given");
  if (options.count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be >= 0");
  for (int s : options.scales) {
    if (s < 1) throw Error(ErrorCode::kInvalidScale, "scale must be at least 1");
  }
  const int width = options.width > 0
                        ? options.width
                        : *std::max_element(options.scales.begin(), options.scales.end());
  const std::size_t shards = options.scales.size();
  std::vector<std::vector<DatasetRecord>> parts(shards);
  auto run_shard = [&](std::size_t s) {
    Rng rng(options.seed, s);
    auto& part = parts[s];
    part.reserve(static_cast<std::size_t>(options.count));
    for (int64_t i = 0; i < options.count; ++i) {
      const TaskInstance t =
          SampleInstance(options.task, options.scales[s], options.sampling, rng, width);
      DatasetRecord r{std::string(TaskName(t.kind)), t.scale, t.InputText(), t.TargetText(),
                      std::nullopt};
      if (options.with_latent) r.latent = t.latent.ToText();
      part.push_back(std::move(r));
    }
  };
  const int workers = std::clamp(options.threads, 1, static_cast<int>(shards));
  if (workers == 1) {
    for (std::size_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t s = next++; s < shards; s = next++) run_shard(s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  Dataset d;
  for (auto& part : parts) {
    std::move(part.begin(), part.end(), std::back_inserter(d.records));
  }
  d.manifest.task = options.task;
  d.manifest.scales = options.scales;
  d.manifest.count = options.count;
  d.manifest.seed = options.seed;
  d.manifest.sampling = options.sampling;
  d.manifest.vocab.assign(kVocabulary.begin(), kVocabulary.end());
  return d;
}

void WriteJsonl(std::ostream& out, const std::vector<DatasetRecord>& records) {
  for (const DatasetRecord& r : records) out << RecordToJsonLine(r) << '\n';
}

std::vector<DatasetRecord> ReadJsonl(std::istream& in) {
  std::vector<DatasetRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(RecordFromJsonLine(line));
  }
  return records;
}

std::string DefaultManifestPath(const std::string& jsonl_path) {
  const std::string ext = ".jsonl";
  if (jsonl_path.size() > ext.size() &&
      jsonl_path.compare(jsonl_path.size() - ext.size(), ext.size(), ext) == 0) {
    return jsonl_path.substr(0, jsonl_path.size() - ext.size()) + ".manifest.json";
  }
  return jsonl_path + ".manifest.json";
}

void WriteDatasetFiles(const std::string& jsonl_path, const std::string& manifest_path,
                       const Dataset& dataset) {
  std::ofstream out(jsonl_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + jsonl_path);
  WriteJsonl(out, dataset.records);
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + jsonl_path);
  std::ofstream man(manifest_path, std::ios::binary);
  if (!man) throw Error(ErrorCode::kIo, "cannot open " + manifest_path);
  man << ManifestToJson(dataset.manifest);
  man.close();
  if (!man) throw Error(ErrorCode::kIo, "write failed for " + manifest_path);
}

bool VerifyRecord(const DatasetRecord& r) {
  const TaskKind kind = ParseTaskKind(r.task);
  const TaskInstance t = ParseInstance(kind, r.input, r.target);
  if (t.scale != r.scale) return false;
  if (r.latent && !(LatentVariable::FromText(kind, *r.latent) == t.latent)) return false;
  return FormatRoundTrip(t);
}

ScoreReport ScorePredictions(const std::vector<DatasetRecord>& records,
                             const std::vector<std::string>& predictions) {
  if (records.size() != predictions.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(records.size()) + " records but " +
                    std::to_string(predictions.size()) + " predictions");
  }
  std::map<int, ScaleScore> by_scale;
  std::map<int, std::vector<int>> correct;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<std::string> want, got;
    std::istringstream ws(records[i].target), gs(predictions[i]);
    for (std::string t; ws >> t;) want.push_back(t);
    for (std::string t; gs >> t;) got.push_back(t);
    ScaleScore& s = by_scale[records[i].scale];
    std::vector<int>& c = correct[records[i].scale];
    s.scale = records[i].scale;
    ++s.count;
    if (want == got) ++s.exact;
    if (s.position_count.size() < want.size()) {
      s.position_count.resize(want.size(), 0);
      c.resize(want.size(), 0);
    }
    for (std::size_t p = 0; p < want.size(); ++p) {
      ++s.position_count[p];
      if (p < got.size() && got[p] == want[p]) ++c[p];
    }
  }
  ScoreReport report;
  for (auto& [scale, s] : by_scale) {
    s.exact_match = static_cast<double>(s.exact) / s.count;
    const std::vector<int>& c = correct[scale];
    for (std::size_t p = 0; p < s.position_count.size(); ++p) {
      s.position_accuracy.push_back(static_cast<double>(c[p]) / s.position_count[p]);
    }
    report.scales.push_back(std::move(s));
  }
  return report;
}

std::string ScoreReportToCsv(const ScoreReport& report) {
  std::size_t width = 0;
  for (const ScaleScore& s : report.scales) width = std::max(width, s.position_accuracy.size());
  std::ostringstream out;
  out << "scale,count,exact_match";
  for (std::size_t p = 0; p < width; ++p) out << ",pos" << p;
  out << '\n';
  for (const ScaleScore& s : report.scales) {
    out << s.scale << ',' << s.count << ',' << s.exact_match;
    for (std::size_t p = 0; p < width; ++p) {
      out << ',';
      if (p < s.position_accuracy.size()) out << s.position_accuracy[p];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ldhd::tasks
