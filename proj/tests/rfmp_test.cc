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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gtest/gtest.h"
#include "ldhd/boolean_core.h"
#include "ldhd/interpolator.h"
#include "test_oracles.h"

namespace {

using ldhd::Error;
using ldhd::ErrorCode;
using namespace ldhd::boolean;  // NOLINT
using namespace ldhd::rfmp;     // NOLINT

Eigen::MatrixXd Rotation() {
  Eigen::MatrixXd v(2, 2);
  v << 0.8, 0.6, 0.6, -0.8;
  return v;
}

TableFunction Concept41() {
  return 4.0 * TableFunction::Coordinate(2, 1) + 3.0 * TableFunction::Coordinate(2, 2);
}

// Infinite-width limit of the min-norm exp model: interpolation with
// E[exp(w.u + b) exp(w.u' + b)] = exp((|u + u'|^2 + 4) / (2r)).
std::vector<double> KernelLimit(const Eigen::MatrixXd& v, int n0,
                                const std::vector<double>& targets) {
  const int n = static_cast<int>(v.rows());
  const double r = static_cast<double>(v.cols());
  auto u = [&](uint32_t m) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = ldhd::testing::Coord(m, i);
    return Eigen::VectorXd(v.transpose() * x);
  };
  auto kernel = [&](uint32_t a, uint32_t b) {
    return std::exp(((u(a) + u(b)).squaredNorm() + 4.0) / (2.0 * r));
  };
  const int rows = 1 << n0;
  Eigen::MatrixXd gram(rows, rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < rows; ++j) gram(i, j) = kernel(i, j);
  }
  const Eigen::VectorXd alpha =
      gram.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(targets.data(), rows));
  std::vector<double> out(1u << n);
  for (uint32_t m = 0; m < out.size(); ++m) {
    for (int i = 0; i < rows; ++i) out[m] += alpha(i) * kernel(i, m);
  }
  return out;
}

TEST(FeaturesTest, DeterministicPerSeed) {
  const auto a = SampleFeatures(64, 3, Activation::kExp, 5);
  const auto b = SampleFeatures(64, 3, Activation::kExp, 5);
  const auto c = SampleFeatures(64, 3, Activation::kExp, 6);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.b, b.b);
  EXPECT_NE(a.w, c.w);
  EXPECT_EQ(a.w.rows(), 3);
  EXPECT_EQ(a.w.cols(), 64);
}

TEST(FeaturesTest, VarianceIsOneOverR) {
  const auto f = SampleFeatures(100000, 4, Activation::kExp, 1);
  const double vw = f.w.array().square().mean();
  const double vb = f.b.array().square().mean();
  EXPECT_NEAR(vw, 0.25, 0.25 * 0.05);
  EXPECT_NEAR(vb, 0.25, 0.25 * 0.05);
}

TEST(FeaturesTest, RejectsBadShapes) {
  EXPECT_THROW(SampleFeatures(0, 2, Activation::kExp, 1), Error);
  EXPECT_THROW(SampleFeatures(4, 0, Activation::kExp, 1), Error);
  EXPECT_EQ(ParseActivation("relu"), Activation::kRelu);
  EXPECT_THROW(ParseActivation("tanh"), Error);
}

TEST(ForwardTest, ZeroAmplitudesGiveZero) {
  const auto f = SampleFeatures(16, 2, Activation::kExp, 2);
  const TableFunction t = ForwardTable(f, Rotation(), Amplitudes::Zero(16));
  for (uint32_t m = 0; m < 4; ++m) EXPECT_EQ(t[m], 0.0);
}

TEST(ForwardTest, SingleFeature) {
  const auto f = SampleFeatures(1, 2, Activation::kExp, 3);
  const HypercubePoint x({1, -1});
  const Eigen::Vector2d u = Rotation().transpose() * Eigen::Vector2d(1, -1);
  EXPECT_NEAR(Forward(f, Rotation(), Amplitudes::Ones(1), x),
              std::exp(f.w.col(0).dot(u) + f.b(0)), 1e-14);
}

TEST(ForwardTest, MatchesStraightLineSumAndIsLinear) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (Activation act : {Activation::kExp, Activation::kRelu}) {
    const auto f = SampleFeatures(37, 2, act, 7);
    Amplitudes a(37), b(37);
    for (int i = 0; i < 37; ++i) {
      a(i) = g(rng);
      b(i) = g(rng);
    }
    const TableFunction ta = ForwardTable(f, Rotation(), a);
    const TableFunction tb = ForwardTable(f, Rotation(), b);
    const TableFunction tab = ForwardTable(f, Rotation(), 2.0 * a - 3.0 * b);
    for (uint32_t m = 0; m < 4; ++m) {
      const double x1 = ldhd::testing::Coord(m, 0), x2 = ldhd::testing::Coord(m, 1);
      const double u1 = 0.8 * x1 + 0.6 * x2, u2 = 0.6 * x1 - 0.8 * x2;
      double s = 0.0;
      for (int k = 0; k < 37; ++k) {
        const double z = f.w(0, k) * u1 + f.w(1, k) * u2 + f.b(k);
        s += a(k) * (act == Activation::kExp ? std::exp(z) : std::max(z, 0.0));
      }
      EXPECT_NEAR(ta[m], s / std::sqrt(37.0), 1e-12);
      EXPECT_NEAR(tab[m], 2.0 * ta[m] - 3.0 * tb[m], 1e-12);
    }
  }
}

TEST(ForwardTest, NonOrthonormalProjectionRejected) {
  Eigen::MatrixXd v(2, 2);
  v << 1, 1, 0, 1;
  try {
    CheckProjection(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotOrthonormal);
  }
}

TEST(MinNormTest, InterpolatesAndZeroTargetsGiveZero) {
  const auto f = SampleFeatures(256, 2, Activation::kExp, 8);
  const SubcubeSpec spec{2, 1};
  const std::vector<double> t{7.0, -1.0};
  const Amplitudes a = MinNormAmplitudes(f, Rotation(), spec, t);
  const TableFunction g = ForwardTable(f, Rotation(), a);
  EXPECT_NEAR(g[0], 7.0, 1e-8);
  EXPECT_NEAR(g[1], -1.0, 1e-8);
  const Amplitudes z = MinNormAmplitudes(f, Rotation(), spec, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(z.norm(), 0.0);
}

TEST(MinNormTest, RankDeficientIsInfeasible) {
  const auto f = SampleFeatures(1, 2, Activation::kExp, 9);
  try {
    MinNormAmplitudes(f, Rotation(), {2, 1}, std::vector<double>{1.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
}

TEST(MinNormTest, ApproachesKernelLimit) {
  const SubcubeSpec spec{2, 1};
  const std::vector<double> t{7.0, -1.0};
  const std::vector<double> limit = KernelLimit(Rotation(), 1, t);
  EXPECT_NEAR(limit[2], 2.575156088200097, 1e-12);
  EXPECT_NEAR(limit[3], -0.36787944117144233, 1e-12);
  // The limit kernel depends on u only through |u + u'|, so it is V-invariant.
  const std::vector<double> ident = KernelLimit(Eigen::MatrixXd::Identity(2, 2), 1, t);
  for (int m = 0; m < 4; ++m) EXPECT_NEAR(ident[m], limit[m], 1e-12);

  double err = 0.0;
  const int seeds = 8;
  for (int s = 0; s < seeds; ++s) {
    const auto f = SampleFeatures(1 << 15, 2, Activation::kExp, 100 + s);
    const TableFunction g = ForwardTable(f, Rotation(), MinNormAmplitudes(f, Rotation(), spec, t));
    err += std::abs(g[2] - limit[2]) + std::abs(g[3] - limit[3]);
  }
  EXPECT_LT(err / (2 * seeds), 0.5);
}

TEST(GdTest, ZeroTargetsStayAtZero) {
  const auto f = SampleFeatures(64, 2, Activation::kExp, 10);
  const GdResult r = TrainGd(f, Rotation(), {2, 1}, std::vector<double>{0.0, 0.0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.a.norm(), 0.0);
}

TEST(GdTest, ConvergesToMinNormAndIsDeterministic) {
  const auto f = SampleFeatures(512, 2, Activation::kExp, 11);
  const SubcubeSpec spec{2, 1};
  const std::vector<double> t{7.0, -1.0};
  GdOptions opt;
  opt.loss_tol = 1e-20;
  const GdResult r = TrainGd(f, Rotation(), spec, t, opt);
  ASSERT_TRUE(r.converged);
  const GdResult again = TrainGd(f, Rotation(), spec, t, opt);
  EXPECT_EQ(r.a, again.a);
  const Amplitudes mn = MinNormAmplitudes(f, Rotation(), spec, t);
  const TableFunction g = ForwardTable(f, Rotation(), r.a);
  const TableFunction h = ForwardTable(f, Rotation(), mn);
  for (uint32_t m = 0; m < 4; ++m) EXPECT_NEAR(g[m], h[m], 1e-6);
}

TEST(GdTest, LargeStepDiverges) {
  const auto f = SampleFeatures(64, 2, Activation::kExp, 12);
  GdOptions opt;
  opt.lr = 100.0;
  try {
    TrainGd(f, Rotation(), {2, 1}, std::vector<double>{7.0, -1.0}, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDiverged);
  }
}

TEST(GdTest, StepBudgetReportsNotConverged) {
  const auto f = SampleFeatures(64, 2, Activation::kExp, 13);
  GdOptions opt;
  opt.max_steps = 3;
  const GdResult r = TrainGd(f, Rotation(), {2, 1}, std::vector<double>{7.0, -1.0}, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.steps, 3);
}

TEST(CompareTest, OracleIsMinDegreeInterpolator) {
  const auto f = SampleFeatures(2048, 2, Activation::kExp, 14);
  const SubcubeSpec spec{2, 1};
  const auto cmp = CompareWithOracle(f, Rotation(), spec, Concept41(), Solver::kMinNorm);
  // 3 + 4 x1
  EXPECT_NEAR(cmp.oracle[0], 7.0, 1e-12);
  EXPECT_NEAR(cmp.oracle[1], -1.0, 1e-12);
  EXPECT_NEAR(cmp.oracle[2], 7.0, 1e-12);
  EXPECT_NEAR(cmp.oracle[3], -1.0, 1e-12);
  EXPECT_LT(cmp.train_loss, 1e-12);
  double sup = 0.0, sq = 0.0;
  for (uint32_t m = 0; m < 4; ++m) {
    const double d = std::abs(cmp.learned[m] - cmp.oracle[m]);
    sup = std::max(sup, d);
    sq += d * d;
  }
  EXPECT_DOUBLE_EQ(cmp.sup_deviation, sup);
  EXPECT_NEAR(cmp.l2_deviation, std::sqrt(sq / 4), 1e-12);
}

TEST(CompareTest, IdentityOracleIsFourierClosedForm) {
  const auto f = SampleFeatures(256, 3, Activation::kExp, 15);
  const SubcubeSpec spec{3, 2};
  const TableFunction target = TableFunction::Parity(3, 0b101) + TableFunction::Coordinate(3, 2);
  const auto cmp =
      CompareWithOracle(f, Eigen::MatrixXd::Identity(3, 3), spec, target, Solver::kMinNorm);
  const auto closed = ldhd::oracle::FourierMinDegreeClosedForm(
      ldhd::oracle::RestrictToSubcube(target, spec), spec);
  const TableFunction want = InverseWalshTransform(closed);
  for (uint32_t m = 0; m < 8; ++m) EXPECT_NEAR(cmp.oracle[m], want[m], 1e-12);
}

}  // namespace
