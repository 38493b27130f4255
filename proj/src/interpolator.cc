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

#include "ldhd/interpolator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace ldhd::oracle {

namespace {

constexpr double kCutoff = boolean::kRankTolerance;

// Orthonormal basis of null(m) as columns, with singular values below
// kCutoff * sigma_max treated as zero.
Eigen::MatrixXd NullSpace(const Eigen::MatrixXd& m) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (top > 0.0 && s(i) > kCutoff * top) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

// Minimum-norm least-squares solution with the same cutoff.
Eigen::VectorXd PseudoSolve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd::Zero(m.cols());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  const double top = m.cwiseAbs().maxCoeff();
  cod.setThreshold(top > 0.0 ? kCutoff : 0.0);
  if (top == 0.0) return Eigen::VectorXd::Zero(m.cols());
  return cod.solve(rhs);
}

}  // namespace

std::vector<double> RestrictToSubcube(const TableFunction& f, const SubcubeSpec& spec) {
  spec.Validate();
  if (f.dimension() != spec.n) {
    throw Error(ErrorCode::kDimensionMismatch, "function and subcube dimensions differ");
  }
  return {f.values().begin(), f.values().begin() + spec.subcube_size()};
}

CoefficientVector MinDegreeInterpolator(const InterpolationProblem& p) {
  if (p.basis == nullptr) throw Error(ErrorCode::kInvalidArgument, "missing basis");
  p.spec.Validate();
  const Basis& basis = *p.basis;
  if (basis.dimension() != p.spec.n) {
    throw Error(ErrorCode::kDimensionMismatch, "basis and subcube dimensions differ");
  }
  const Eigen::Index rows = p.spec.subcube_size();
  if (static_cast<Eigen::Index>(p.targets.size()) != rows) {
    throw Error(ErrorCode::kDimensionMismatch, "need one target per subcube point");
  }
  const Eigen::MatrixXd e = basis.evaluation_matrix().topRows(rows);
  const Eigen::Map<const Eigen::VectorXd> t(p.targets.data(), rows);

  Eigen::VectorXd c = PseudoSolve(e, t);
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  const double residual = rows > 0 ? (e * c - t).cwiseAbs().maxCoeff() : 0.0;
  if (residual > kCutoff * scale * std::sqrt(static_cast<double>(basis.size()))) {
    throw Error(ErrorCode::kInfeasible,
                "targets are not reachable in span(" + basis.label() + "), residual " +
                    std::to_string(residual));
  }
  Eigen::MatrixXd z = NullSpace(e);

  for (int d = basis.max_degree(); d >= 0 && z.cols() > 0; --d) {
    std::vector<int> level;
    for (int k = 0; k < basis.size(); ++k) {
      if (basis.degrees()[k] == d) level.push_back(k);
    }
    if (level.empty()) continue;
    Eigen::MatrixXd sz(level.size(), z.cols());
    Eigen::VectorXd sc(level.size());
    for (std::size_t r = 0; r < level.size(); ++r) {
      sz.row(r) = z.row(level[r]);
      sc(r) = c(level[r]);
    }
    const Eigen::VectorXd y = PseudoSolve(sz, -sc);
    c += z * y;
    z = z * NullSpace(sz);
  }
  if (z.cols() > 0) {
    throw Error(ErrorCode::kRankTolerance,
                std::to_string(z.cols()) + " free directions left after all degree levels");
  }
  return c;
}

FourierCoefficients FourierMinDegreeClosedForm(std::span<const double> targets,
                                               const SubcubeSpec& spec) {
  spec.Validate();
  if (targets.size() != spec.subcube_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one target per subcube point");
  }
  std::vector<double> a(targets.begin(), targets.end());
  for (std::size_t half = 1; half < a.size(); half <<= 1) {
    for (std::size_t block = 0; block < a.size(); block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        const double u = a[k];
        a[k] = u + a[k + half];
        a[k + half] = u - a[k + half];
      }
    }
  }
  std::vector<double> out(spec.cube_size(), 0.0);
  const double norm = std::ldexp(1.0, -spec.n0);
  for (std::size_t m = 0; m < a.size(); ++m) out[m] = a[m] * norm;
  return FourierCoefficients(spec.n, std::move(out));
}

void FiniteLabelSet::Validate() const {
  if (labels.empty() || labels.size() > 8) {
    throw Error(ErrorCode::kInvalidArgument, "label set must have 1 to 8 entries");
  }
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      if (labels[a] == labels[b]) {
        throw Error(ErrorCode::kInvalidArgument, "labels must be distinct");
      }
    }
  }
}

LossSpec LossSpec::ZeroOne(int label_count) {
  LossSpec l;
  l.table.assign(static_cast<std::size_t>(label_count) * label_count, 1.0);
  for (int a = 0; a < label_count; ++a) l.table[a * label_count + a] = 0.0;
  return l;
}

LossSpec LossSpec::Squared(const FiniteLabelSet& y) {
  LossSpec l;
  for (double a : y.labels) {
    for (double b : y.labels) l.table.push_back((a - b) * (a - b));
  }
  return l;
}

DistributionSpec DistributionSpec::Uniform(int n) {
  boolean::CheckDimension(n);
  return {std::vector<double>(std::size_t{1} << n, std::ldexp(1.0, -n))};
}

void DistributionSpec::Validate(int n) const {
  if (weights.size() != (std::size_t{1} << n)) {
    throw Error(ErrorCode::kDimensionMismatch, "distribution needs 2^N weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::kInvalidArgument, "distribution must have full support");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "distribution weights must sum to 1");
  }
}

uint64_t NflInterpolatorCount(const SubcubeSpec& spec, int label_count) {
  spec.Validate();
  const uint64_t free_points = spec.cube_size() - spec.subcube_size();
  uint64_t count = 1;
  for (uint64_t i = 0; i < free_points; ++i) {
    if (label_count > 1 && count > kMaxNflAssignments / label_count) {
      throw Error(ErrorCode::kTooLarge,
                  "|Y|^(2^N - 2^N0) exceeds 2^20 interpolators");
    }
    count *= label_count;
  }
  return count;
}

double NflInterpolatorSum(std::span<const int> c_labels, const SubcubeSpec& spec,
                          const FiniteLabelSet& y, const LossSpec& loss,
                          const DistributionSpec& d, int threads) {
  spec.Validate();
  y.Validate();
  d.Validate(spec.n);
  const int ny = y.size();
  if (loss.table.size() != static_cast<std::size_t>(ny) * ny) {
    throw Error(ErrorCode::kDimensionMismatch, "loss table must be |Y| x |Y|");
  }
  if (c_labels.size() != spec.cube_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "concept needs one label per cube point");
  }
  for (int c : c_labels) {
    if (c < 0 || c >= ny) throw Error(ErrorCode::kInvalidArgument, "concept label out of range");
  }
  const uint64_t total = NflInterpolatorCount(spec, ny);
  const uint32_t first_free = spec.subcube_size();
  const uint32_t cube = spec.cube_size();

  // Contribution of the shared subcube part, identical for every f.
  double fixed = 0.0;
  for (uint32_t m = 0; m < first_free; ++m) {
    fixed += d.weights[m] * loss.table[c_labels[m] * ny + c_labels[m]];
  }

  constexpr uint64_t kChunks = 64;
  std::vector<double> partial(kChunks, 0.0);
  auto run_chunk = [&](uint64_t chunk) {
    const uint64_t begin = total * chunk / kChunks;
    const uint64_t end = total * (chunk + 1) / kChunks;
    double acc = 0.0;
    for (uint64_t a = begin; a < end; ++a) {
      double value = fixed;
      uint64_t code = a;
      for (uint32_t m = first_free; m < cube; ++m) {
        const int label = static_cast<int>(code % ny);
        code /= ny;
        value += d.weights[m] * loss.table[c_labels[m] * ny + label];
      }
      acc += value;
    }
    partial[chunk] = acc;
  };

  const int workers = std::clamp(threads, 1, static_cast<int>(kChunks));
  if (workers == 1) {
    for (uint64_t k = 0; k < kChunks; ++k) run_chunk(k);
  } else {
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (uint64_t k = next++; k < kChunks; k = next++) run_chunk(k);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  double sum = 0.0;
  for (double v : partial) sum += v;
  return sum;
}

GeneralizationReport MakeGeneralizationReport(const TableFunction& predictor,
                                              const TableFunction& target,
                                              const SubcubeSpec& spec) {
  spec.Validate();
  if (predictor.dimension() != spec.n || target.dimension() != spec.n) {
    throw Error(ErrorCode::kDimensionMismatch, "report inputs must match the cube");
  }
  GeneralizationReport r;
  auto add = [](DeviationStats& s, double dev) {
    s.max = std::max(s.max, dev);
    s.mean += dev;
    ++s.count;
  };
  for (uint32_t m = 0; m < spec.cube_size(); ++m) {
    const double dev = std::abs(predictor[m] - target[m]);
    add(spec.Contains(m) ? r.train : r.test, dev);
    add(r.all, dev);
  }
  for (DeviationStats* s : {&r.train, &r.test, &r.all}) {
    if (s->count > 0) s->mean /= s->count;
  }
  return r;
}

}  // namespace ldhd::oracle
