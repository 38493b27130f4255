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

// Random feature model with projection:
//   f(x; a) = K^{-1/2} sum_k a_k sigma(<w_k, V^T x> + b_k)
// with frozen Gaussian features and learnable amplitudes a.

#ifndef LDHD_RFMP_H_
#define LDHD_RFMP_H_

#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "ldhd/boolean_core.h"

namespace ldhd::rfmp {

using boolean::HypercubePoint;
using boolean::SubcubeSpec;
using boolean::TableFunction;

enum class Activation { kExp, kRelu };

std::string_view ActivationName(Activation act);
Activation ParseActivation(std::string_view name);

// Throws NotOrthonormal unless ||V^T V - I_r||_max <= 1e-10.
void CheckProjection(const Eigen::MatrixXd& v);

struct FeatureSet {
  int k = 0;
  int r = 0;
  Activation activation = Activation::kExp;
  uint64_t seed = 0;
  Eigen::MatrixXd w;  // r x K, column k is w_k
  Eigen::VectorXd b;  // K
};

// w_k ~ N(0, I_r / r), b_k ~ N(0, 1 / r), drawn from a 64-bit Mersenne
// Twister seeded with `seed`.
FeatureSet SampleFeatures(int k, int r, Activation activation, uint64_t seed);

using Amplitudes = Eigen::VectorXd;

double Activate(Activation act, double z);

double Forward(const FeatureSet& features, const Eigen::MatrixXd& v, const Amplitudes& a,
               const HypercubePoint& x);

// Rows are cube indices [0, count), columns are features; entries include
// the K^{-1/2} factor.
Eigen::MatrixXd FeatureMatrix(const FeatureSet& features, const Eigen::MatrixXd& v,
                              uint32_t count);

// The model evaluated on the whole cube of dimension V.rows().
TableFunction ForwardTable(const FeatureSet& features, const Eigen::MatrixXd& v,
                           const Amplitudes& a);

// Minimum-norm amplitudes interpolating the targets on X_{N0}. Throws
// Infeasible when the subcube feature matrix is rank deficient and
// IllConditioned when its condition number exceeds kMaxCondition.
inline constexpr double kMaxCondition = 1e12;
Amplitudes MinNormAmplitudes(const FeatureSet& features, const Eigen::MatrixXd& v,
                             const SubcubeSpec& spec, std::span<const double> targets);

struct GdOptions {
  double lr = 0.05;
  int64_t max_steps = 1000000;
  double loss_tol = 1e-10;
};

struct GdResult {
  Amplitudes a;
  double loss = 0.0;
  int64_t steps = 0;
  bool converged = false;
};

// Full-batch gradient descent from a = 0 on
//   L(a) = 1/2 * 2^{-N0} * sum_{x in X_{N0}} (f(x; a) - t(x))^2.
// Throws Diverged once the loss exceeds ten times its running minimum.
GdResult TrainGd(const FeatureSet& features, const Eigen::MatrixXd& v, const SubcubeSpec& spec,
                 std::span<const double> targets, const GdOptions& options = {});

enum class Solver { kMinNorm, kGd };

struct OracleComparison {
  TableFunction learned;
  TableFunction oracle;
  double sup_deviation = 0.0;
  double l2_deviation = 0.0;  // root mean square over X_N
  double train_loss = 0.0;
};

// Fits the concept's values on X_{N0}, computes the min-degree interpolator
// with respect to the projected basis of V, and compares them over X_N.
OracleComparison CompareWithOracle(const FeatureSet& features, const Eigen::MatrixXd& v,
                                   const SubcubeSpec& spec, const TableFunction& target,
                                   Solver solver, const GdOptions& options = {});

}  // namespace ldhd::rfmp

#endif  // LDHD_RFMP_H_
