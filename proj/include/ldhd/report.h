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

// Pass/fail reports produced by the verification suites.

#ifndef LDHD_REPORT_H_
#define LDHD_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ldhd::cli {

enum class Relation { kAtMost, kAtLeast, kEqual };

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::kAtMost;
  bool passed = false;
};

// A named table written to CSV (alpha ladders, K sweeps, ...).
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct VerificationReport {
  std::string suite;
  uint64_t seed = 0;
  std::vector<Check> checks;
  std::vector<std::string> notes;  // informational, never affect the verdict
  std::vector<Table> tables;
  std::optional<double> wall_seconds;

  bool passed() const;

  Check& AtMost(const std::string& name, double measured, double threshold);
  Check& AtLeast(const std::string& name, double measured, double threshold);
  // Boolean check, recorded as measured 1/0 against threshold 1.
  Check& Holds(const std::string& name, bool ok);
  Check& Equals(const std::string& name, double measured, double expected);

  std::string ToText() const;
  std::string ToJson() const;
  std::string TablesToCsv() const;
  static VerificationReport FromJson(const std::string& text);
};

// {"passed": .., "suites": [..]} over several reports.
std::string MergeReports(const std::vector<VerificationReport>& reports);

// Shortest round-trip decimal form.
std::string FormatNumber(double v);

}  // namespace ldhd::cli

#endif  // LDHD_REPORT_H_
