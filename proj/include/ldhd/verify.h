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

// Verification suites run by `ldhd verify <suite>`. Each returns a report
// whose checks carry the measured value next to its threshold.

#ifndef LDHD_VERIFY_H_
#define LDHD_VERIFY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ldhd/report.h"

namespace ldhd::cli {

struct RfmpSuiteOptions {
  // "example-4-1" (the two-dimensional example and the K trend),
  // "sparse" (random 2-sparse concepts) or "all".
  std::string preset = "example-4-1";
  int k = 8192;
  std::vector<int> k_ladder = {512, 2048, 8192};
  int seeds = 10;
  int concepts = 50;
  double lr = 0.05;
  int64_t max_steps = 1000000;
  double loss_tol = 1e-10;
  double threshold = 0.2;
  double fraction = 0.9;
  uint64_t seed = 1;
  int threads = 1;
};
VerificationReport VerifyRfmp(const RfmpSuiteOptions& o);

struct OracleSuiteOptions {
  int n = 4;
  int n0 = 3;
  int concepts = 50;
  double threshold = 1e-8;
  uint64_t seed = 1;
};
VerificationReport VerifyOracle(const OracleSuiteOptions& o);

struct NflSuiteOptions {
  int n = 3;
  int n0 = 2;
  int pairs = 100;
  int distributions = 5;
  int labels = 2;
  double threshold = 1e-9;
  uint64_t seed = 1;
  int threads = 1;
};
VerificationReport VerifyNfl(const NflSuiteOptions& o);

struct PlaaLossSuiteOptions {
  int trials = 100;
  int max_n = 6;
  int max_counting_n0 = 16;
  double threshold = 1e-10;
  uint64_t seed = 1;
};
VerificationReport VerifyPlaaLoss(const PlaaLossSuiteOptions& o);

struct PlaaIdentitySuiteOptions {
  int trials = 20;
  int max_n = 8;
  double threshold = 1e-12;
  uint64_t seed = 1;
};
VerificationReport VerifyPlaaIdentity(const PlaaIdentitySuiteOptions& o);

struct PlaaApeSuiteOptions {
  int n = 4;
  int n0 = 2;
  int d_p = 0;  // 0 means N
  int targets = 20;
  std::vector<double> ladder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4};
  double lr = 0.02;
  int64_t max_steps = 1000000;
  double threshold = 1e-3;
  uint64_t seed = 1;
  int threads = 1;
};
VerificationReport VerifyPlaaApe(const PlaaApeSuiteOptions& o);

struct PlaaGrpeSuiteOptions {
  int n = 5;
  int n0 = 3;
  int random = 50;
  double lr = 0.1;
  int64_t max_steps = 1000000;
  double threshold = 1e-8;
  double agreement_tol = 1e-6;
  uint64_t seed = 1;
};
VerificationReport VerifyPlaaGrpe(const PlaaGrpeSuiteOptions& o);

struct PeSuiteOptions {
  int max_n = 16;
  int d = 4;
  double logit_scale = 30.0;
  double eps = 1e-5;
  int gradcheck_trials = 5;
  int gradcheck_n = 6;
  double onehot_threshold = 1e-6;
  double naive_threshold = 1e-12;
  double threshold = 1e-4;  // gradient checks
  uint64_t seed = 1;
};
VerificationReport VerifyPe(const PeSuiteOptions& o);

struct TasksSuiteOptions {
  int count = 10000;
  int max_scale = 4;
  int length_samples = 100000;
  int length_max_scale = 5;
  uint64_t seed = 0;
  int threads = 1;
};
VerificationReport VerifyTasks(const TasksSuiteOptions& o);

// Runs `count` independent jobs on up to `threads` threads.
void ParallelFor(int count, int threads, const std::function<void(int)>& job);

}  // namespace ldhd::cli

#endif  // LDHD_VERIFY_H_
