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

// Position-only linear attention with advice: f(x; A) = x^T A e_{n(x)} for an
// upper-triangular A, with the absolute (A = M o P^T P) and generalized
// relative (A = sum_k p_k U_k) parameterizations.

#ifndef LDHD_PLAA_H_
#define LDHD_PLAA_H_

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ldhd/boolean_core.h"

namespace ldhd::plaa {

using boolean::HypercubePoint;
using boolean::TableFunction;

// n(x): largest one-based i with x_i = -1, or 0 for the all-ones point.
int Advice(const HypercubePoint& x);
inline int AdviceOfIndex(uint32_t index) { return static_cast<int>(std::bit_width(index)); }

// Throws InvalidArgument unless a is square with zeros below the diagonal.
void CheckUpperTriangular(const Eigen::MatrixXd& a);
// M o a: a with the strictly lower part zeroed.
Eigen::MatrixXd UpperMask(const Eigen::MatrixXd& a);

double PlaaForward(const Eigen::MatrixXd& a, const HypercubePoint& x);
double PlaaForwardIndex(const Eigen::MatrixXd& a, uint32_t index);
TableFunction PlaaTable(const Eigen::MatrixXd& a);

// Q_ij = 2^{-(N0-j+1)/2} for 1 <= i <= j <= N0, zero elsewhere.
Eigen::MatrixXd QMask(int n, int n0);

// 1/2 * 2^{-N0} * sum_{x in X_{N0}} (f(x; a) - f(x; b))^2 by enumeration.
double EnumeratedLoss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int n0);
// 1/2 * ||Q o (a - b)||_F^2 over the upper triangle.
double ClosedFormLoss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int n0);

struct GdOptions {
  double lr = 0.02;
  int64_t max_steps = 1000000;
  double loss_tol = 1e-12;
  double grad_tol = 1e-10;
};

struct TracePoint {
  int64_t step = 0;
  double loss = 0.0;
};

// ---- APE ----

// P_0 = sqrt(alpha) [I_N; 0], d_P x N.
Eigen::MatrixXd ApeInit(int n, int d_p, double alpha);
Eigen::MatrixXd ApeMatrix(const Eigen::MatrixXd& p);
double ApeForward(const Eigen::MatrixXd& p, const HypercubePoint& x);
double ApeLoss(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a_star, int n0);
// d ApeLoss / dP = P (W + W^T), W = upper(Q^2 o (P^T P - A*)).
Eigen::MatrixXd ApeGradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a_star, int n0);

struct ApeTrainResult {
  Eigen::MatrixXd p0;
  Eigen::MatrixXd p;
  double alpha = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  int64_t steps = 0;
  bool converged = false;
  std::vector<TracePoint> trace;  // powers-of-two steps and the final step
};

// Gradient descent on ApeLoss from ApeInit. Throws Diverged once the loss
// exceeds ten times its running minimum.
ApeTrainResult ApeTrain(const Eigen::MatrixXd& a_star, int n0, int d_p, double alpha,
                        const GdOptions& options = {});

// N (N - N0) alpha ||A*||_inf + ((N - N0 + 1)(N - N0) / 2) alpha^2, with
// ||A*||_inf the largest absolute entry.
double ApeDeviationBound(const Eigen::MatrixXd& a_star, int n0, double alpha);
// A* on the [N0] x [N0] block, zero elsewhere.
Eigen::MatrixXd RestrictToBlock(const Eigen::MatrixXd& a_star, int n0);

struct AlphaRun {
  double alpha = 0.0;
  double loss = 0.0;
  int64_t steps = 0;
  bool converged = false;
  bool columns_frozen = false;
  double deviation_sq = 0.0;  // ||M o P^T P - restricted A*||_F^2
  double bound = 0.0;
  double block_error = 0.0;   // max |(M o P^T P - A*)_ij| over the block
};

struct AlphaLimitReport {
  std::vector<AlphaRun> runs;
  Eigen::MatrixXd a_hat;  // M o P^T P at the last (smallest) alpha
};

inline const std::vector<double>& DefaultAlphaLadder() {
  static const std::vector<double> kLadder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4};
  return kLadder;
}

AlphaLimitReport ApeAlphaLimit(const Eigen::MatrixXd& a_star, int n0, int d_p,
                               std::span<const double> ladder, const GdOptions& options = {});

// Upper-triangular A* whose [N0] block is upper(G^T G / N0 + I / 2) for a
// Gaussian G, so the block loss can reach zero, with standard normal entries
// elsewhere.
Eigen::MatrixXd RandomApeTarget(int n, int n0, uint64_t seed);

// ---- GRPE ----

using GrpeBasis = std::vector<Eigen::MatrixXd>;

// Throws unless every U_k is upper triangular with <U_k, U_k> = 1 and the
// supports are pairwise disjoint.
void CheckGrpeBasis(const GrpeBasis& u);
// U_k = D_k / sqrt(N + 1 - k), D_k the ones on the (k-1)-th superdiagonal.
GrpeBasis GrpeBasisRpe(int n);
Eigen::MatrixXd GrpeMatrix(const GrpeBasis& u, const Eigen::VectorXd& p);
double GrpeForward(const GrpeBasis& u, const Eigen::VectorXd& p, const HypercubePoint& x);
double GrpeLoss(const GrpeBasis& u, const Eigen::VectorXd& p, const Eigen::VectorXd& p_star,
                int n0);

struct GrpeTrainResult {
  Eigen::VectorXd p;
  double loss = 0.0;
  double grad_norm = 0.0;
  int64_t steps = 0;
  bool converged = false;
};

inline GdOptions DefaultGrpeOptions() { return {0.1, 1000000, 0.0, 1e-10}; }

// Gradient descent from p = 0 towards the concept GrpeForward(u, p_star, .)
// on uniform X_{N0}.
GrpeTrainResult GrpeTrain(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0,
                          const GdOptions& options = DefaultGrpeOptions());

// p_k for every k whose induced function is nonzero somewhere on X_{N0}, 0
// for the others.
Eigen::VectorXd GrpeClosedForm(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0);

// {k : (U_k) restricted to [N0] x [N0] is zero} within {k : p*_k = 0}.
bool CorollaryPredicate(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0);

}  // namespace ldhd::plaa

#endif  // LDHD_PLAA_H_
