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

#include "ldhd/plaa.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ldhd::plaa {

int Advice(const HypercubePoint& x) { return AdviceOfIndex(x.index()); }

void CheckUpperTriangular(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kInvalidArgument, "matrix must be square");
  boolean::CheckDimension(static_cast<int>(a.rows()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "matrix has a nonzero below the diagonal");
      }
    }
  }
}

Eigen::MatrixXd UpperMask(const Eigen::MatrixXd& a) {
  return a.triangularView<Eigen::Upper>();
}

double PlaaForwardIndex(const Eigen::MatrixXd& a, uint32_t index) {
  const int j = AdviceOfIndex(index);
  if (j == 0) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= j; ++i) s += ((index >> (i - 1)) & 1u ? -1.0 : 1.0) * a(i - 1, j - 1);
  return s;
}

double PlaaForward(const Eigen::MatrixXd& a, const HypercubePoint& x) {
  if (x.dimension() != a.rows()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  CheckUpperTriangular(a);
  return PlaaForwardIndex(a, x.index());
}

TableFunction PlaaTable(const Eigen::MatrixXd& a) {
  CheckUpperTriangular(a);
  const int n = static_cast<int>(a.rows());
  std::vector<double> values(std::size_t{1} << n);
  for (uint32_t m = 0; m < values.size(); ++m) values[m] = PlaaForwardIndex(a, m);
  return TableFunction(n, std::move(values));
}

namespace {

void CheckSubcube(int n, int n0) {
  boolean::SubcubeSpec{n, n0}.Validate();
}

void CheckPair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrices must be N x N of equal size");
  }
}

}  // namespace

Eigen::MatrixXd QMask(int n, int n0) {
  CheckSubcube(n, n0);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j <= n0; ++j) {
    const double v = std::pow(2.0, -(n0 - j + 1) / 2.0);
    for (int i = 1; i <= j; ++i) q(i - 1, j - 1) = v;
  }
  return q;
}

double EnumeratedLoss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int n0) {
  CheckPair(a, b);
  CheckSubcube(static_cast<int>(a.rows()), n0);
  const Eigen::MatrixXd ua = UpperMask(a);
  const Eigen::MatrixXd ub = UpperMask(b);
  const uint32_t count = uint32_t{1} << n0;
  double s = 0.0;
  for (uint32_t m = 0; m < count; ++m) {
    const double d = PlaaForwardIndex(ua, m) - PlaaForwardIndex(ub, m);
    s += d * d;
  }
  return 0.5 * s / count;
}

double ClosedFormLoss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int n0) {
  CheckPair(a, b);
  const Eigen::MatrixXd q = QMask(static_cast<int>(a.rows()), n0);
  return 0.5 * q.cwiseProduct(UpperMask(a - b)).squaredNorm();
}

Eigen::MatrixXd ApeInit(int n, int d_p, double alpha) {
  boolean::CheckDimension(n);
  if (d_p < n) throw Error(ErrorCode::kInvalidArgument, "d_P must be at least N");
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d_p, n);
  p.topRows(n) = std::sqrt(alpha) * Eigen::MatrixXd::Identity(n, n);
  return p;
}

Eigen::MatrixXd ApeMatrix(const Eigen::MatrixXd& p) { return UpperMask(p.transpose() * p); }

double ApeForward(const Eigen::MatrixXd& p, const HypercubePoint& x) {
  if (x.dimension() != p.cols()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  return PlaaForwardIndex(ApeMatrix(p), x.index());
}

double ApeLoss(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a_star, int n0) {
  return ClosedFormLoss(p.transpose() * p, a_star, n0);
}

Eigen::MatrixXd ApeGradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a_star, int n0) {
  CheckPair(p.transpose() * p, a_star);
  const Eigen::MatrixXd q = QMask(static_cast<int>(p.cols()), n0);
  const Eigen::MatrixXd w =
      q.cwiseProduct(q).cwiseProduct(UpperMask(p.transpose() * p - a_star));
  return p * (w + w.transpose());
}

ApeTrainResult ApeTrain(const Eigen::MatrixXd& a_star, int n0, int d_p, double alpha,
                        const GdOptions& options) {
  CheckUpperTriangular(a_star);
  const int n = static_cast<int>(a_star.rows());
  CheckSubcube(n, n0);
  if (!(options.lr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lr must be positive");
  ApeTrainResult r;
  r.alpha = alpha;
  r.p0 = ApeInit(n, d_p, alpha);
  r.p = r.p0;
  double best = std::numeric_limits<double>::infinity();
  int64_t next_trace = 1;
  while (true) {
    r.loss = ApeLoss(r.p, a_star, n0);
    const Eigen::MatrixXd g = ApeGradient(r.p, a_star, n0);
    r.grad_norm = g.norm();
    if (!std::isfinite(r.loss) || r.loss > 10.0 * best) {
      throw Error(ErrorCode::kDiverged, "APE loss rose to " + std::to_string(r.loss));
    }
    best = std::min(best, r.loss);
    if (r.steps == 0 || r.steps == next_trace) {
      r.trace.push_back({r.steps, r.loss});
      if (r.steps != 0) next_trace *= 2;
    }
    if (r.loss <= options.loss_tol || r.grad_norm <= options.grad_tol) {
      r.converged = true;
      break;
    }
    if (r.steps >= options.max_steps) break;
    r.p -= options.lr * g;
    ++r.steps;
  }
  if (r.trace.back().step != r.steps) r.trace.push_back({r.steps, r.loss});
  return r;
}

double ApeDeviationBound(const Eigen::MatrixXd& a_star, int n0, double alpha) {
  const int n = static_cast<int>(a_star.rows());
  CheckSubcube(n, n0);
  const double tail = n - n0;
  return n * tail * alpha * a_star.cwiseAbs().maxCoeff() + (tail + 1) * tail / 2.0 * alpha * alpha;
}

Eigen::MatrixXd RestrictToBlock(const Eigen::MatrixXd& a_star, int n0) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a_star.rows(), a_star.cols());
  out.topLeftCorner(n0, n0) = a_star.topLeftCorner(n0, n0);
  return out;
}

AlphaLimitReport ApeAlphaLimit(const Eigen::MatrixXd& a_star, int n0, int d_p,
                               std::span<const double> ladder, const GdOptions& options) {
  if (ladder.empty()) throw Error(ErrorCode::kInvalidArgument, "empty alpha ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0) || (i > 0 && !(ladder[i] < ladder[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument, "alpha ladder must be positive and decreasing");
    }
  }
  const int n = static_cast<int>(a_star.rows());
  const Eigen::MatrixXd target = RestrictToBlock(a_star, n0);
  AlphaLimitReport report;
  for (double alpha : ladder) {
    const ApeTrainResult t = ApeTrain(a_star, n0, d_p, alpha, options);
    AlphaRun run;
    run.alpha = alpha;
    run.loss = t.loss;
    run.steps = t.steps;
    run.converged = t.converged;
    run.columns_frozen = (t.p.rightCols(n - n0).array() == t.p0.rightCols(n - n0).array()).all();
    const Eigen::MatrixXd a_hat = ApeMatrix(t.p);
    run.deviation_sq = (a_hat - target).squaredNorm();
    run.bound = ApeDeviationBound(a_star, n0, alpha);
    run.block_error =
        n0 == 0 ? 0.0
                : UpperMask(a_hat - a_star).topLeftCorner(n0, n0).cwiseAbs().maxCoeff();
    report.runs.push_back(run);
    report.a_hat = a_hat;
  }
  return report;
}

Eigen::MatrixXd RandomApeTarget(int n, int n0, uint64_t seed) {
  CheckSubcube(n, n0);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) a(i, j) = normal(gen);
  }
  if (n0 > 0) {
    Eigen::MatrixXd g(n0, n0);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n0; ++j) g(i, j) = normal(gen);
    }
    const Eigen::MatrixXd s =
        g.transpose() * g / n0 + 0.5 * Eigen::MatrixXd::Identity(n0, n0);
    a.topLeftCorner(n0, n0) = UpperMask(s);
  }
  return a;
}

void CheckGrpeBasis(const GrpeBasis& u) {
  if (u.empty()) throw Error(ErrorCode::kInvalidArgument, "empty GRPE basis");
  const Eigen::Index n = u.front().rows();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k].rows() != n) throw Error(ErrorCode::kDimensionMismatch, "GRPE matrices differ in size");
    CheckUpperTriangular(u[k]);
    if (std::abs(u[k].squaredNorm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument, "GRPE matrix " + std::to_string(k) + " is not unit norm");
    }
    for (std::size_t l = 0; l < k; ++l) {
      if ((u[k].array() * u[l].array() != 0.0).any()) {
        throw Error(ErrorCode::kInvalidArgument, "GRPE matrices share support");
      }
    }
  }
}

GrpeBasis GrpeBasisRpe(int n) {
  boolean::CheckDimension(n);
  GrpeBasis u;
  for (int k = 1; k <= n; ++k) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i + k - 1 <= n; ++i) d(i - 1, i + k - 2) = 1.0;
    u.push_back(d / std::sqrt(static_cast<double>(n + 1 - k)));
  }
  return u;
}

Eigen::MatrixXd GrpeMatrix(const GrpeBasis& u, const Eigen::VectorXd& p) {
  if (u.empty() || p.size() != static_cast<Eigen::Index>(u.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "need one parameter per GRPE matrix");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(u.front().rows(), u.front().cols());
  for (std::size_t k = 0; k < u.size(); ++k) a += p(k) * u[k];
  return a;
}

double GrpeForward(const GrpeBasis& u, const Eigen::VectorXd& p, const HypercubePoint& x) {
  return PlaaForward(GrpeMatrix(u, p), x);
}

double GrpeLoss(const GrpeBasis& u, const Eigen::VectorXd& p, const Eigen::VectorXd& p_star,
                int n0) {
  return ClosedFormLoss(GrpeMatrix(u, p), GrpeMatrix(u, p_star), n0);
}

GrpeTrainResult GrpeTrain(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0,
                          const GdOptions& options) {
  CheckGrpeBasis(u);
  const int n = static_cast<int>(u.front().rows());
  CheckSubcube(n, n0);
  if (!(options.lr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lr must be positive");
  const Eigen::MatrixXd q = QMask(n, n0);
  const Eigen::MatrixXd q2 = q.cwiseProduct(q);
  const Eigen::MatrixXd a_star = GrpeMatrix(u, p_star);
  GrpeTrainResult r;
  r.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size()));
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd g(r.p.size());
  while (true) {
    const Eigen::MatrixXd diff = GrpeMatrix(u, r.p) - a_star;
    r.loss = 0.5 * q.cwiseProduct(diff).squaredNorm();
    const Eigen::MatrixXd w = q2.cwiseProduct(diff);
    for (std::size_t k = 0; k < u.size(); ++k) g(k) = w.cwiseProduct(u[k]).sum();
    r.grad_norm = g.norm();
    if (!std::isfinite(r.loss) || r.loss > 10.0 * best) {
      throw Error(ErrorCode::kDiverged, "GRPE loss rose to " + std::to_string(r.loss));
    }
    best = std::min(best, r.loss);
    if (r.loss <= options.loss_tol || r.grad_norm <= options.grad_tol) {
      r.converged = true;
      break;
    }
    if (r.steps >= options.max_steps) break;
    r.p -= options.lr * g;
    ++r.steps;
  }
  return r;
}

Eigen::VectorXd GrpeClosedForm(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0) {
  CheckGrpeBasis(u);
  if (p_star.size() != static_cast<Eigen::Index>(u.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "need one parameter per GRPE matrix");
  }
  CheckSubcube(static_cast<int>(u.front().rows()), n0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p_star.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    bool nonzero = false;
    for (uint32_t m = 0; m < (uint32_t{1} << n0) && !nonzero; ++m) {
      nonzero = PlaaForwardIndex(u[k], m) != 0.0;
    }
    if (nonzero) out(k) = p_star(k);
  }
  return out;
}

bool CorollaryPredicate(const GrpeBasis& u, const Eigen::VectorXd& p_star, int n0) {
  CheckGrpeBasis(u);
  if (p_star.size() != static_cast<Eigen::Index>(u.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "need one parameter per GRPE matrix");
  }
  CheckSubcube(static_cast<int>(u.front().rows()), n0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const bool block_zero = n0 == 0 || (u[k].topLeftCorner(n0, n0).array() == 0.0).all();
    if (block_zero && p_star(k) != 0.0) return false;
  }
  return true;
}

}  // namespace ldhd::plaa
