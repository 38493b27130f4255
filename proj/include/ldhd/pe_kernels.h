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

// Additive positional-bias kernels for causal attention: RPE, RPE-Square,
// RPE-Absolute and ALiBi, with analytic gradients of the summed bias.
//
// Positions are zero-based. A BiasMatrix b has b(i, j) for key i <= query j
// and zeros below the diagonal. Embeddings are d x n, column t is x_t.

#ifndef LDHD_PE_KERNELS_H_
#define LDHD_PE_KERNELS_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ldhd/error.h"

namespace ldhd::pe {

using BiasMatrix = Eigen::MatrixXd;

// R indexed by signed offsets in [-(L-1), L-1].
class RelTable {
 public:
  RelTable(int window, std::vector<double> values);
  static RelTable Zero(int window);

  int window() const { return window_; }
  // Throws WindowExceeded for |offset| >= L.
  double at(int offset) const;
  double& mutable_at(int offset);
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  // Position of `offset` in values().
  int IndexOf(int offset) const;
  // Throws WindowExceeded unless L >= n.
  void CheckCovers(int n) const;

 private:
  int window_;
  std::vector<double> values_;
};

struct ProjPair {
  Eigen::MatrixXd wq;
  Eigen::MatrixXd wk;
  void Validate() const;
};

// a(j, l) = softmax over l <= j of (W_Q x_j)^T (W_K x_l), zero for l > j.
Eigen::MatrixXd CausalAttention(const Eigen::MatrixXd& embeddings, const ProjPair& w);

// b(i, j) = R_{j-i}.
BiasMatrix RpeBias(const RelTable& r, int n);

// b(i, j) = sum_{l<=j} sum_{k<=i} a(j, l) a(i, k) R_{(j-l)-(i-k)}, evaluated
// through the offset distributions p_j(u) = a(j, j-u).
BiasMatrix RpeSquareBias(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                         const RelTable& r);
// Direct quadruple sum.
BiasMatrix RpeSquareBiasNaive(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                              const RelTable& r);

// b(i, j) = sum_{k<=i} a(i, k) R_{i-k}; constant along each row.
BiasMatrix RpeAbsoluteBias(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                           const RelTable& r);

// b(i, j) = -slope (j - i).
BiasMatrix AlibiBias(double slope, int n);

enum class Kernel { kRpe, kRpeSquare, kRpeAbsolute, kAlibi };
std::string_view KernelName(Kernel k);
Kernel ParseKernel(std::string_view name);

struct PeInputs {
  Eigen::MatrixXd embeddings;  // d x n
  ProjPair w;
  RelTable r = RelTable::Zero(1);
  double slope = 0.0;  // ALiBi only

  int length() const { return static_cast<int>(embeddings.cols()); }
};

BiasMatrix ComputeBias(Kernel kernel, const PeInputs& in);

// Gradient of S = sum_{i<=j} b(i, j).
struct BiasGradient {
  std::vector<double> d_r;  // aligned with RelTable::values()
  Eigen::MatrixXd d_wq;
  Eigen::MatrixXd d_wk;
};

double SumBias(Kernel kernel, const PeInputs& in);
// ALiBi has no trainable inputs among R, W_Q, W_K and is rejected.
BiasGradient SumBiasGradient(Kernel kernel, const PeInputs& in);

struct GradcheckResult {
  double r_error = 0.0;
  double wq_error = 0.0;
  double wk_error = 0.0;
  double max_error = 0.0;
};

// Central differences of SumBias against SumBiasGradient. Each group's error
// is ||analytic - numeric||_inf / max(||analytic||_inf, ||numeric||_inf), or the
// absolute difference when that scale is below 1e-8; eps must lie in
// [1e-7, 1e-3].
GradcheckResult FiniteDiffGradcheck(Kernel kernel, const PeInputs& in, double eps);

// "row,col,value" with row = key i, col = query j, for every i <= j.
std::string BiasToCsv(const BiasMatrix& b);
// Parses BiasToCsv output back into an n x n matrix.
BiasMatrix BiasFromCsv(const std::string& text);

// Gaussian embeddings, projections (entries scaled by 1/sqrt(d)) and R.
PeInputs RandomPeInputs(int d, int n, int window, uint64_t seed);

// JSON with keys "embeddings" (n rows of d values, one row per position),
// "wq", "wk" (d rows of d), "r" (2L-1 values, offset -(L-1) first),
// "window" and optional "slope".
std::string PeInputsToJson(const PeInputs& in);
PeInputs PeInputsFromJson(const std::string& text);

}  // namespace ldhd::pe

#endif  // LDHD_PE_KERNELS_H_
