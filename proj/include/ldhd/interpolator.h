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

// Min-degree interpolators with respect to arbitrary bases, the Fourier closed
// form, exhaustive No-Free-Lunch sums and train/test deviation reports.

#ifndef LDHD_INTERPOLATOR_H_
#define LDHD_INTERPOLATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldhd/boolean_core.h"

namespace ldhd::oracle {

using boolean::Basis;
using boolean::CoefficientVector;
using boolean::FourierCoefficients;
using boolean::SubcubeSpec;
using boolean::TableFunction;

// targets[m] is the value at subcube index m, m < 2^{N0}.
struct InterpolationProblem {
  SubcubeSpec spec;
  const Basis* basis = nullptr;
  std::vector<double> targets;
};

// Values of f on X_{N0}, in subcube index order.
std::vector<double> RestrictToSubcube(const TableFunction& f, const SubcubeSpec& spec);

// Coefficients of the interpolator of the targets on X_{N0} whose degree
// profile in p.basis is lexicographically minimal. Throws Infeasible when no
// element of the span matches the targets, RankTolerance when the solver is
// left with an unresolved free direction.
CoefficientVector MinDegreeInterpolator(const InterpolationProblem& p);

// Walsh transform of the targets as an N0-variable function, embedded so
// that only T within [N0] carry mass.
FourierCoefficients FourierMinDegreeClosedForm(std::span<const double> targets,
                                               const SubcubeSpec& spec);

struct FiniteLabelSet {
  std::vector<double> labels;
  void Validate() const;
  int size() const { return static_cast<int>(labels.size()); }
};

// table[a * |Y| + b] = loss(labels[a], labels[b]).
struct LossSpec {
  std::vector<double> table;
  static LossSpec ZeroOne(int label_count);
  static LossSpec Squared(const FiniteLabelSet& y);
};

// weights[m] is the probability of cube index m.
struct DistributionSpec {
  std::vector<double> weights;
  static DistributionSpec Uniform(int n);
  void Validate(int n) const;
};

// Largest enumeration the NFL sum accepts.
inline constexpr uint64_t kMaxNflAssignments = uint64_t{1} << 20;

// Exact sum over every f agreeing with c on X_{N0} of E_{x~D}[l(c(x), f(x))].
// Concept labels are indices into y over the whole cube. Throws TooLarge
// when |Y|^{2^N - 2^{N0}} exceeds kMaxNflAssignments. The work is split into
// a fixed set of chunks summed in order, so the result does not depend on
// `threads`.
double NflInterpolatorSum(std::span<const int> c_labels, const SubcubeSpec& spec,
                          const FiniteLabelSet& y, const LossSpec& loss,
                          const DistributionSpec& d, int threads = 1);

// Number of interpolators enumerated by NflInterpolatorSum.
uint64_t NflInterpolatorCount(const SubcubeSpec& spec, int label_count);

struct DeviationStats {
  double max = 0.0;
  double mean = 0.0;
  int count = 0;
};

struct GeneralizationReport {
  DeviationStats train;  // X_{N0}
  DeviationStats test;   // X_N minus X_{N0}
  DeviationStats all;    // X_N
};

GeneralizationReport MakeGeneralizationReport(const TableFunction& predictor,
                                              const TableFunction& target,
                                              const SubcubeSpec& spec);

}  // namespace ldhd::oracle

#endif  // LDHD_INTERPOLATOR_H_
