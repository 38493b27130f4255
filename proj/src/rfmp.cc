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

#include "ldhd/rfmp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ldhd/interpolator.h"

namespace ldhd::rfmp {

std::string_view ActivationName(Activation act) {
  return act == Activation::kExp ? "exp" : "relu";
}

Activation ParseActivation(std::string_view name) {
  if (name == "exp") return Activation::kExp;
  if (name == "relu") return Activation::kRelu;
  throw Error(ErrorCode::kInvalidArgument, "unknown activation " + std::string(name));
}

void CheckProjection(const Eigen::MatrixXd& v) {
  boolean::CheckDimension(static_cast<int>(v.rows()));
  if (v.cols() < 1 || v.cols() > v.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "projection must be N x r with 1 <= r <= N");
  }
  const double defect =
      (v.transpose() * v - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw Error(ErrorCode::kNotOrthonormal, "V^T V deviates from I_r by " + std::to_string(defect));
  }
}

FeatureSet SampleFeatures(int k, int r, Activation activation, uint64_t seed) {
  if (k < 1 || r < 1) throw Error(ErrorCode::kInvalidArgument, "need K >= 1 and r >= 1");
  FeatureSet f;
  f.k = k;
  f.r = r;
  f.activation = activation;
  f.seed = seed;
  f.w.resize(r, k);
  f.b.resize(k);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(r)));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < r; ++i) f.w(i, j) = normal(gen);
    f.b(j) = normal(gen);
  }
  return f;
}

double Activate(Activation act, double z) {
  return act == Activation::kExp ? std::exp(z) : std::max(0.0, z);
}

namespace {

void CheckShapes(const FeatureSet& features, const Eigen::MatrixXd& v) {
  CheckProjection(v);
  if (v.cols() != features.r) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension differs from projection rank");
  }
}

}  // namespace

double Forward(const FeatureSet& features, const Eigen::MatrixXd& v, const Amplitudes& a,
               const HypercubePoint& x) {
  CheckShapes(features, v);
  if (x.dimension() != v.rows() || a.size() != features.k) {
    throw Error(ErrorCode::kDimensionMismatch, "point or amplitude length");
  }
  Eigen::VectorXd xv(x.dimension());
  for (int i = 0; i < x.dimension(); ++i) xv(i) = x[i];
  const Eigen::VectorXd z = v.transpose() * xv;
  double s = 0.0;
  for (int j = 0; j < features.k; ++j) {
    s += a(j) * Activate(features.activation, features.w.col(j).dot(z) + features.b(j));
  }
  return s / std::sqrt(static_cast<double>(features.k));
}

Eigen::MatrixXd FeatureMatrix(const FeatureSet& features, const Eigen::MatrixXd& v,
                              uint32_t count) {
  CheckShapes(features, v);
  const int n = static_cast<int>(v.rows());
  if (count > (uint32_t{1} << n)) throw Error(ErrorCode::kInvalidArgument, "too many rows");
  Eigen::MatrixXd x(count, n);
  for (uint32_t m = 0; m < count; ++m) {
    for (int i = 0; i < n; ++i) x(m, i) = (m >> i) & 1u ? -1.0 : 1.0;
  }
  Eigen::MatrixXd pre = x * v * features.w;
  pre.rowwise() += features.b.transpose();
  const double norm = 1.0 / std::sqrt(static_cast<double>(features.k));
  return pre.unaryExpr([&](double z) { return Activate(features.activation, z) * norm; });
}

TableFunction ForwardTable(const FeatureSet& features, const Eigen::MatrixXd& v,
                           const Amplitudes& a) {
  if (a.size() != features.k) throw Error(ErrorCode::kDimensionMismatch, "amplitude length");
  const int n = static_cast<int>(v.rows());
  const Eigen::VectorXd y = FeatureMatrix(features, v, uint32_t{1} << n) * a;
  return TableFunction(n, std::vector<double>(y.data(), y.data() + y.size()));
}

namespace {

Eigen::Map<const Eigen::VectorXd> TargetVector(const SubcubeSpec& spec,
                                               std::span<const double> targets) {
  spec.Validate();
  if (targets.size() != spec.subcube_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one target per subcube point");
  }
  return {targets.data(), static_cast<Eigen::Index>(targets.size())};
}

}  // namespace

Amplitudes MinNormAmplitudes(const FeatureSet& features, const Eigen::MatrixXd& v,
                             const SubcubeSpec& spec, std::span<const double> targets) {
  const auto t = TargetVector(spec, targets);
  if (spec.n != v.rows()) throw Error(ErrorCode::kDimensionMismatch, "subcube vs projection");
  const Eigen::MatrixXd phi = FeatureMatrix(features, v, spec.subcube_size());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() < phi.rows() || s(s.size() - 1) == 0.0 ||
      s(s.size() - 1) <= std::numeric_limits<double>::epsilon() * s(0) * phi.cols()) {
    throw Error(ErrorCode::kInfeasible, "feature matrix on the subcube lacks full row rank");
  }
  const double cond = s(0) / s(s.size() - 1);
  if (cond > kMaxCondition) {
    throw Error(ErrorCode::kIllConditioned, "feature matrix condition number " + std::to_string(cond));
  }
  const Eigen::VectorXd coef = (svd.matrixU().transpose() * t).cwiseQuotient(s);
  return svd.matrixV() * coef;
}

GdResult TrainGd(const FeatureSet& features, const Eigen::MatrixXd& v, const SubcubeSpec& spec,
                 std::span<const double> targets, const GdOptions& options) {
  const auto t = TargetVector(spec, targets);
  if (spec.n != v.rows()) throw Error(ErrorCode::kDimensionMismatch, "subcube vs projection");
  if (!(options.lr > 0.0) || options.max_steps < 0) {
    throw Error(ErrorCode::kInvalidArgument, "lr must be positive and max_steps >= 0");
  }
  const Eigen::MatrixXd phi = FeatureMatrix(features, v, spec.subcube_size());
  const double inv_rows = 1.0 / static_cast<double>(phi.rows());
  GdResult r;
  r.a = Amplitudes::Zero(features.k);
  Eigen::VectorXd residual = -t;
  r.loss = 0.5 * inv_rows * residual.squaredNorm();
  double best = r.loss;
  while (true) {
    if (r.loss <= options.loss_tol) {
      r.converged = true;
      break;
    }
    if (r.steps >= options.max_steps) break;
    r.a -= options.lr * inv_rows * (phi.transpose() * residual);
    residual = phi * r.a - t;
    r.loss = 0.5 * inv_rows * residual.squaredNorm();
    ++r.steps;
    if (!std::isfinite(r.loss) || r.loss > 10.0 * best) {
      throw Error(ErrorCode::kDiverged, "loss rose to " + std::to_string(r.loss) + " at step " +
                                            std::to_string(r.steps));
    }
    best = std::min(best, r.loss);
  }
  return r;
}

OracleComparison CompareWithOracle(const FeatureSet& features, const Eigen::MatrixXd& v,
                                   const SubcubeSpec& spec, const TableFunction& target,
                                   Solver solver, const GdOptions& options) {
  const std::vector<double> targets = oracle::RestrictToSubcube(target, spec);
  Amplitudes a;
  if (solver == Solver::kMinNorm) {
    a = MinNormAmplitudes(features, v, spec, targets);
  } else {
    a = TrainGd(features, v, spec, targets, options).a;
  }
  const boolean::Basis basis = boolean::ProjectedBasis(v);
  const boolean::CoefficientVector c =
      oracle::MinDegreeInterpolator({spec, &basis, targets});
  OracleComparison out{ForwardTable(features, v, a), basis.Combine(c)};
  double sq = 0.0;
  for (std::size_t m = 0; m < out.learned.size(); ++m) {
    const double dev = std::abs(out.learned[m] - out.oracle[m]);
    out.sup_deviation = std::max(out.sup_deviation, dev);
    sq += dev * dev;
  }
  out.l2_deviation = std::sqrt(sq / static_cast<double>(out.learned.size()));
  double loss = 0.0;
  for (uint32_t m = 0; m < spec.subcube_size(); ++m) {
    const double e = out.learned[m] - targets[m];
    loss += e * e;
  }
  out.train_loss = 0.5 * loss / spec.subcube_size();
  return out;
}

}  // namespace ldhd::rfmp
