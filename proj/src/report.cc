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

#include "ldhd/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldhd/error.h"

namespace ldhd::cli {

namespace {

using nlohmann::json;

const char* RelationSymbol(Relation r) {
  switch (r) {
    case Relation::kAtMost: return "<=";
    case Relation::kAtLeast: return ">=";
    case Relation::kEqual: return "==";
  }
  return "?";
}

Relation ParseRelation(const std::string& s) {
  if (s == "<=") return Relation::kAtMost;
  if (s == ">=") return Relation::kAtLeast;
  if (s == "==") return Relation::kEqual;
  throw Error(ErrorCode::kParseError, "unknown relation '" + s + "'");
}

// JSON has no NaN or infinity; they are stored as strings.
json Number(double v) {
  if (std::isfinite(v)) return v;
  return FormatNumber(v);
}

double ReadNumber(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw Error(ErrorCode::kParseError, "bad number '" + s + "'");
}

json ReportJson(const VerificationReport& r) {
  json checks = json::array();
  for (const Check& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"measured", Number(c.measured)},
                      {"threshold", Number(c.threshold)},
                      {"relation", RelationSymbol(c.relation)},
                      {"passed", c.passed}});
  }
  json tables = json::array();
  for (const Table& t : r.tables) {
    tables.push_back({{"name", t.name}, {"header", t.header}, {"rows", t.rows}});
  }
  json j = {{"suite", r.suite},       {"seed", r.seed},     {"passed", r.passed()},
            {"checks", checks},       {"notes", r.notes},   {"tables", tables}};
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j;
}

}  // namespace

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Check& VerificationReport::AtMost(const std::string& name, double measured, double threshold) {
  checks.push_back({name, measured, threshold, Relation::kAtMost, measured <= threshold});
  return checks.back();
}

Check& VerificationReport::AtLeast(const std::string& name, double measured, double threshold) {
  checks.push_back({name, measured, threshold, Relation::kAtLeast, measured >= threshold});
  return checks.back();
}

Check& VerificationReport::Holds(const std::string& name, bool ok) {
  checks.push_back({name, ok ? 1.0 : 0.0, 1.0, Relation::kEqual, ok});
  return checks.back();
}

Check& VerificationReport::Equals(const std::string& name, double measured, double expected) {
  checks.push_back({name, measured, expected, Relation::kEqual, measured == expected});
  return checks.back();
}

std::string VerificationReport::ToText() const {
  std::ostringstream out;
  out << "suite " << suite << " (seed " << seed << ")\n";
  for (const Check& c : checks) {
    out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": "
        << FormatNumber(c.measured) << ' ' << RelationSymbol(c.relation) << ' '
        << FormatNumber(c.threshold) << '\n';
  }
  for (const std::string& n : notes) out << "  note: " << n << '\n';
  if (wall_seconds) out << "  wall time " << FormatNumber(*wall_seconds) << " s\n";
  out << "result: " << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

std::string VerificationReport::ToJson() const { return ReportJson(*this).dump(2) + "\n"; }

std::string VerificationReport::TablesToCsv() const {
  std::ostringstream out;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    if (t > 0) out << '\n';
    out << "# " << tables[t].name << '\n';
    for (std::size_t i = 0; i < tables[t].header.size(); ++i) {
      out << (i ? "," : "") << tables[t].header[i];
    }
    out << '\n';
    for (const auto& row : tables[t].rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }
  return out.str();
}

VerificationReport VerificationReport::FromJson(const std::string& text) {
  VerificationReport r;
  try {
    const json j = json::parse(text);
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    for (const json& c : j.at("checks")) {
      r.checks.push_back({c.at("name").get<std::string>(), ReadNumber(c.at("measured")),
                          ReadNumber(c.at("threshold")),
                          ParseRelation(c.at("relation").get<std::string>()),
                          c.at("passed").get<bool>()});
    }
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("tables")) {
      for (const json& t : j.at("tables")) {
        r.tables.push_back({t.at("name").get<std::string>(),
                            t.at("header").get<std::vector<std::string>>(),
                            t.at("rows").get<std::vector<std::vector<std::string>>>()});
      }
    }
    if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad report: ") + e.what());
  }
  return r;
}

std::string MergeReports(const std::vector<VerificationReport>& reports) {
  json suites = json::array();
  bool all = true;
  for (const VerificationReport& r : reports) {
    suites.push_back(ReportJson(r));
    all = all && r.passed();
  }
  return json{{"passed", all}, {"suites", suites}}.dump(2) + "\n";
}

}  // namespace ldhd::cli
