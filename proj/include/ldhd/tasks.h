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

// Length-generalization tasks: latent variables, their string formats and a
// parser that inverts the formats.
//
// Tokens are single characters from kVocabulary joined by single spaces. The
// input runs through "=", the target is everything after it, ending in "e".
// Digit sequences written x_0 x_1 ... are least significant first.

#ifndef LDHD_TASKS_H_
#define LDHD_TASKS_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ldhd/error.h"

namespace ldhd::tasks {

inline constexpr std::array<std::string_view, 16> kVocabulary = {
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "+", "*", "\\", "=", "b", "e"};

enum class TaskKind {
  kUrfAddition,
  kArfAddition,
  kUnalignedCopy,
  kParityCot,
  kMul1N,
  kDivN1,
  kAdditionMod10,
};

inline constexpr std::array<TaskKind, 7> kAllTasks = {
    TaskKind::kUrfAddition, TaskKind::kArfAddition, TaskKind::kUnalignedCopy,
    TaskKind::kParityCot,   TaskKind::kMul1N,       TaskKind::kDivN1,
    TaskKind::kAdditionMod10};

// "urf-add", "arf-add", "copy", "parity-cot", "mul-1n", "div-n1", "add-mod10".
std::string_view TaskName(TaskKind kind);
TaskKind ParseTaskKind(std::string_view name);

// Entry value for an undetermined component.
inline constexpr int kUndetermined = -1;

// entries[k] holds the components of latent dimension k:
//   urf-add, arf-add, add-mod10: (x_k, y_k), 0 beyond an addend's length
//   copy:                        (d_k)
//   parity-cot:                  (x_k)
//   mul-1n:                      (x, y_k)
//   div-n1:                      (x, y_{n-1-k}), most significant first
// LatentOf appends the chain-of-thought component.
struct LatentVariable {
  TaskKind kind = TaskKind::kUrfAddition;
  std::vector<std::vector<int>> entries;

  int dimension() const { return static_cast<int>(entries.size()); }
  // "3,3 2,2 1,1" with "*" for undetermined components.
  std::string ToText() const;
  static LatentVariable FromText(TaskKind kind, std::string_view text);
  friend bool operator==(const LatentVariable&, const LatentVariable&) = default;
};

struct TaskInstance {
  TaskKind kind = TaskKind::kUrfAddition;
  int scale = 0;
  int width = 0;  // arf-add only: padded addend width
  LatentVariable latent;
  std::vector<std::string> input_tokens;
  std::vector<std::string> target_tokens;

  std::string InputText() const;
  std::string TargetText() const;
};

// Deterministic stream keyed by (seed, shard).
class Rng {
 public:
  Rng(uint64_t seed, uint64_t shard);
  // Uniform on [0, bound), bound >= 1, without modulo bias.
  uint64_t Below(uint64_t bound);
  // Uniform on [lo, hi].
  int Between(int lo, int hi);

 private:
  std::mt19937_64 gen_;
};

enum class ScaleMode {
  kUpTo,   // sample the scale (or addend lengths) up to the given value
  kExact,  // the instance has exactly the given scale
};

// Throws InvalidScale for scale < 1, or for arf-add when width < scale.
// width is only read for arf-add; 0 means "use scale".
TaskInstance SampleInstance(TaskKind kind, int scale, ScaleMode mode, Rng& rng, int width = 0);

// The data format mapping: latent -> tokens.
TaskInstance FormatInstance(const LatentVariable& latent, int width = 0);

// Inverse of FormatInstance. Throws ParseError on text outside the grammar.
TaskInstance ParseInstance(TaskKind kind, std::string_view input, std::string_view target);

// Latent with the chain-of-thought component: outputs z_k (parity y_k, copy
// d_k) for k < cot_position and kUndetermined otherwise. add-mod10 has no
// per-dimension output and returns its latent unchanged.
LatentVariable LatentOf(const TaskInstance& instance, int cot_position);

// Parses the instance's own text and checks that the latent and both token
// sequences are reproduced. Throws ParseError on malformed text.
bool FormatRoundTrip(const TaskInstance& instance);

// Splits "a b c" on single spaces; throws ParseError on empty or
// multi-character tokens and on symbols outside kVocabulary.
std::vector<std::string> Tokenize(std::string_view text);
std::string JoinTokens(const std::vector<std::string>& tokens);

}  // namespace ldhd::tasks

#endif  // LDHD_TASKS_H_
