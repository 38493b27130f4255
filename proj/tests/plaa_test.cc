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
using ldhd::boolean::HypercubePoint;
using ldhd::boolean::TableFunction;
using namespace ldhd::plaa;  // NOLINT

Eigen::MatrixXd RandomUpper(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) a(i, j) = g(rng);
  }
  return a;
}

TEST(AdviceTest, Examples) {
  EXPECT_EQ(Advice(HypercubePoint({1, 1, 1})), 0);
  EXPECT_EQ(Advice(HypercubePoint({-1, 1, 1})), 1);
  EXPECT_EQ(Advice(HypercubePoint({-1, -1, 1})), 2);
  EXPECT_EQ(Advice(HypercubePoint({1, 1, -1})), 3);
  for (uint32_t m = 0; m < 64; ++m) EXPECT_EQ(AdviceOfIndex(m), ldhd::testing::NaiveAdvice(m, 6));
}

TEST(ForwardTest, Examples) {
  EXPECT_EQ(PlaaForward(Eigen::MatrixXd::Ones(3, 3).triangularView<Eigen::Upper>().toDenseMatrix(),
                        HypercubePoint({1, 1, 1})),
            0.0);
  Eigen::MatrixXd e12 = Eigen::MatrixXd::Zero(2, 2);
  e12(0, 1) = 1.0;
  EXPECT_EQ(PlaaForward(e12, HypercubePoint({1, -1})), 1.0);
  EXPECT_EQ(PlaaForward(e12, HypercubePoint({-1, -1})), -1.0);
  EXPECT_EQ(PlaaForward(e12, HypercubePoint({-1, 1})), 0.0);
}

TEST(ForwardTest, MatchesNaiveAndBasisExpansion) {
  std::mt19937_64 rng(31);
  for (int n = 1; n <= 6; ++n) {
    const Eigen::MatrixXd a = RandomUpper(n, rng);
    const TableFunction t = PlaaTable(a);
    TableFunction sum = TableFunction::Zero(n);
    for (int j = 1; j <= n; ++j) {
      for (int i = 1; i <= j; ++i) sum += a(i - 1, j - 1) * ldhd::boolean::PlaaBasisFunction(n, i, j);
    }
    for (uint32_t m = 0; m < t.size(); ++m) {
      EXPECT_NEAR(t[m], ldhd::testing::NaivePlaa(a, m), 1e-13);
      EXPECT_NEAR(t[m], sum[m], 1e-12);
      EXPECT_EQ(PlaaForwardIndex(a, m), t[m]);
    }
  }
}

TEST(ForwardTest, RejectsLowerEntries) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(2, 0) = 1.0;
  EXPECT_THROW(CheckUpperTriangular(a), Error);
  EXPECT_THROW(PlaaTable(a), Error);
  EXPECT_THROW(CheckUpperTriangular(Eigen::MatrixXd::Zero(2, 3)), Error);
  EXPECT_EQ(UpperMask(Eigen::MatrixXd::Ones(3, 3)).sum(), 6.0);
}

TEST(QMaskTest, Values) {
  const Eigen::MatrixXd q1 = QMask(3, 1);
  EXPECT_DOUBLE_EQ(q1(0, 0), std::sqrt(0.5));
  EXPECT_EQ(q1.cwiseAbs().sum(), q1(0, 0));
  const Eigen::MatrixXd q2 = QMask(3, 2);
  EXPECT_DOUBLE_EQ(q2(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(q2(0, 1), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(q2(1, 1), std::sqrt(0.5));
  EXPECT_EQ(q2(1, 0), 0.0);
  EXPECT_EQ(q2.col(2).norm(), 0.0);
}

// Q_ij^2 is the share of X_{N0} with n(x) = j.
TEST(QMaskTest, SquaresAreAdviceFrequencies) {
  for (int n0 = 1; n0 <= 8; ++n0) {
    const Eigen::MatrixXd q = QMask(n0, n0);
    std::vector<double> share(n0 + 1, 0.0);
    for (uint32_t m = 0; m < (1u << n0); ++m) share[ldhd::testing::NaiveAdvice(m, n0)] += 1.0;
    for (int j = 1; j <= n0; ++j) {
      EXPECT_NEAR(q(0, j - 1) * q(0, j - 1), share[j] / (1u << n0), 1e-15);
    }
  }
}

TEST(LossTest, ClosedFormMatchesEnumeration) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const int n0 = trial % (n + 1);
    const Eigen::MatrixXd a = RandomUpper(n, rng);
    const Eigen::MatrixXd b = RandomUpper(n, rng);
    const double naive = ldhd::testing::NaivePlaaLoss(a, b, n0);
    EXPECT_NEAR(ClosedFormLoss(a, b, n0), naive, 1e-10);
    EXPECT_NEAR(EnumeratedLoss(a, b, n0), naive, 1e-12);
  }
}

TEST(ApeTest, InitAndMatrix) {
  const Eigen::MatrixXd p = ApeInit(3, 5, 0.04);
  ASSERT_EQ(p.rows(), 5);
  ASSERT_EQ(p.cols(), 3);
  EXPECT_TRUE(p.topRows(3).isApprox(0.2 * Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(p.bottomRows(2).norm(), 0.0);
  EXPECT_TRUE(ApeMatrix(p).isApprox(0.04 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST(ApeTest, ForwardIsPlaaOfMaskedGram) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  Eigen::MatrixXd p(5, 4);
  for (int i = 0; i < p.size(); ++i) p(i) = g(rng);
  const Eigen::MatrixXd a = (p.transpose() * p).triangularView<Eigen::Upper>();
  for (uint32_t m = 0; m < 16; ++m) {
    EXPECT_NEAR(ApeForward(p, HypercubePoint::FromIndex(m, 4)), ldhd::testing::NaivePlaa(a, m),
                1e-12);
  }
  EXPECT_EQ(ApeForward(Eigen::MatrixXd::Zero(4, 4), HypercubePoint({-1, -1, 1, 1})), 0.0);
}

TEST(ApeTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd a_star = RandomUpper(4, rng);
  Eigen::MatrixXd p(6, 4);
  for (int i = 0; i < p.size(); ++i) p(i) = g(rng);
  const Eigen::MatrixXd grad = ApeGradient(p, a_star, 3);
  const double h = 1e-6;
  for (int i = 0; i < p.size(); ++i) {
    Eigen::MatrixXd up = p, dn = p;
    up(i) += h;
    dn(i) -= h;
    const double fd = (ApeLoss(up, a_star, 3) - ApeLoss(dn, a_star, 3)) / (2 * h);
    EXPECT_NEAR(grad(i), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(ApeTest, LossZeroAtTarget) {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> g;
  Eigen::MatrixXd p(4, 4);
  for (int i = 0; i < p.size(); ++i) p(i) = g(rng);
  const Eigen::MatrixXd a_star = (p.transpose() * p).triangularView<Eigen::Upper>();
  EXPECT_NEAR(ApeLoss(p, a_star, 4), 0.0, 1e-20);
}

TEST(ApeTest, TrainingFreezesColumnsPastN0) {
  const Eigen::MatrixXd a_star = RandomApeTarget(4, 2, 7);
  const double alpha = 1e-3;
  const ApeTrainResult r = ApeTrain(a_star, 2, 4, alpha);
  ASSERT_TRUE(r.converged);
  EXPECT_TRUE(r.p.rightCols(2) == r.p0.rightCols(2));
  const Eigen::MatrixXd a_hat = ApeMatrix(r.p);
  const Eigen::MatrixXd block = RestrictToBlock(a_star, 2);
  const double dev = (a_hat - block).squaredNorm();
  EXPECT_LE(dev, ApeDeviationBound(a_star, 2, alpha) + 1e-9);
  EXPECT_LT((a_hat - block).topLeftCorner(2, 2).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(ApeTest, TraceSchedule) {
  const Eigen::MatrixXd a_star = RandomApeTarget(3, 2, 8);
  const ApeTrainResult r = ApeTrain(a_star, 2, 3, 1e-2);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
    EXPECT_TRUE(std::has_single_bit(static_cast<uint64_t>(r.trace[i].step)) ||
                r.trace[i].step == 0);
  }
  EXPECT_EQ(r.trace.back().step, r.steps);
  EXPECT_DOUBLE_EQ(r.trace.back().loss, r.loss);
}

TEST(ApeTest, ZeroTargetLearnsZeroOnSubcube) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  const ApeTrainResult r = ApeTrain(zero, 2, 3, 1e-2);
  // Quartic near zero, so only a sublinear rate.
  EXPECT_LT(r.loss, 1e-9);
  EXPECT_LE(r.p.norm(), r.p0.norm() + 1e-15);
  for (uint32_t m = 0; m < 4; ++m) {
    EXPECT_LT(std::abs(ApeForward(r.p, HypercubePoint::FromIndex(m, 3))), 1e-4);
  }
}

TEST(ApeTest, FullSubcubeRecoversTarget) {
  const Eigen::MatrixXd a_star = RandomApeTarget(3, 3, 9);
  const ApeTrainResult r = ApeTrain(a_star, 3, 3, 1e-4);
  ASSERT_TRUE(r.converged);
  EXPECT_LT((ApeMatrix(r.p) - a_star).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(ApeTest, OffBlockTargetDoesNotGeneralize) {
  const Eigen::MatrixXd a_star = RandomApeTarget(4, 2, 10);
  const ApeTrainResult r = ApeTrain(a_star, 2, 4, 1e-3);
  const auto rep = ldhd::oracle::MakeGeneralizationReport(PlaaTable(ApeMatrix(r.p)),
                                                          PlaaTable(a_star), {4, 2});
  EXPECT_LT(rep.train.max, 1e-2);
  EXPECT_GT(rep.test.max, 1e-1);
}

TEST(ApeTest, AlphaLadderBoundsHold) {
  const Eigen::MatrixXd a_star = RandomApeTarget(4, 2, 11);
  const std::vector<double> ladder = {1e-2, 1e-3};
  const AlphaLimitReport rep = ApeAlphaLimit(a_star, 2, 4, ladder);
  ASSERT_EQ(rep.runs.size(), 2u);
  for (const AlphaRun& run : rep.runs) {
    EXPECT_TRUE(run.converged);
    EXPECT_TRUE(run.columns_frozen);
    EXPECT_LE(run.deviation_sq, run.bound + 1e-9);
  }
  EXPECT_LT(rep.runs.back().deviation_sq, rep.runs.front().deviation_sq);
}

TEST(ApeTest, DeviationBoundFormula) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 3) = -2.0;
  // 4 * 2 * 0.1 * 2 + (3 * 2 / 2) * 0.01
  EXPECT_NEAR(ApeDeviationBound(a, 2, 0.1), 1.6 + 0.03, 1e-15);
}

TEST(GrpeTest, RpeBasis) {
  const GrpeBasis u = GrpeBasisRpe(3);
  ASSERT_EQ(u.size(), 3u);
  EXPECT_NO_THROW(CheckGrpeBasis(u));
  EXPECT_DOUBLE_EQ(u[2](0, 2), 1.0);
  EXPECT_EQ(u[2].cwiseAbs().sum(), 1.0);
  EXPECT_DOUBLE_EQ(u[0](1, 1), 1.0 / std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(u[1](0, 1), 1.0 / std::sqrt(2.0));
  for (const auto& m : u) EXPECT_NEAR(m.squaredNorm(), 1.0, 1e-15);
}

TEST(GrpeTest, CheckRejectsOverlapAndScale) {
  GrpeBasis u = GrpeBasisRpe(3);
  u.push_back(u[0]);
  EXPECT_THROW(CheckGrpeBasis(u), Error);
  GrpeBasis v = GrpeBasisRpe(3);
  v[0] *= 2.0;
  EXPECT_THROW(CheckGrpeBasis(v), Error);
}

TEST(GrpeTest, Forward) {
  GrpeBasis one = {Eigen::MatrixXd::Ones(1, 1)};
  EXPECT_EQ(GrpeForward(one, Eigen::VectorXd::Ones(1), HypercubePoint({-1})), -1.0);
  const GrpeBasis u = GrpeBasisRpe(4);
  std::mt19937_64 rng(36);
  std::normal_distribution<double> g;
  Eigen::VectorXd p(4);
  for (int k = 0; k < 4; ++k) p(k) = g(rng);
  const Eigen::MatrixXd a = GrpeMatrix(u, p);
  for (uint32_t m = 0; m < 16; ++m) {
    EXPECT_NEAR(GrpeForward(u, p, HypercubePoint::FromIndex(m, 4)),
                ldhd::testing::NaivePlaa(a, m), 1e-13);
    EXPECT_EQ(GrpeForward(u, Eigen::VectorXd::Zero(4), HypercubePoint::FromIndex(m, 4)), 0.0);
  }
}

TEST(GrpeTest, ExampleThreeTwo) {
  const GrpeBasis u = GrpeBasisRpe(3);
  const Eigen::VectorXd p_star = Eigen::VectorXd::Ones(3);
  const GrpeTrainResult r = GrpeTrain(u, p_star, 2);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.p(0), 1.0, 1e-8);
  EXPECT_NEAR(r.p(1), 1.0, 1e-8);
  EXPECT_NEAR(r.p(2), 0.0, 1e-8);
  const Eigen::VectorXd closed = GrpeClosedForm(u, p_star, 2);
  EXPECT_EQ(closed, Eigen::Vector3d(1, 1, 0));
  EXPECT_FALSE(CorollaryPredicate(u, p_star, 2));
  EXPECT_TRUE(CorollaryPredicate(u, Eigen::Vector3d(1, 1, 0), 2));
  EXPECT_TRUE(CorollaryPredicate(u, Eigen::Vector3d::Zero(), 2));
}

TEST(GrpeTest, ZeroTargetAndFullSubcube) {
  const GrpeBasis u = GrpeBasisRpe(4);
  const GrpeTrainResult z = GrpeTrain(u, Eigen::VectorXd::Zero(4), 2);
  EXPECT_EQ(z.p.norm(), 0.0);
  const Eigen::Vector4d p_star(0.5, -1.0, 2.0, 0.25);
  EXPECT_EQ(GrpeClosedForm(u, p_star, 4), Eigen::VectorXd(p_star));
  const GrpeTrainResult r = GrpeTrain(u, p_star, 4);
  EXPECT_LT((r.p - p_star).cwiseAbs().maxCoeff(), 1e-8);
}

// Exact generalization on X_N exactly when the predicate holds.
TEST(GrpeTest, PredicateMatchesGeneralization) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> g;
  std::bernoulli_distribution keep(0.5);
  const int n = 4;
  const GrpeBasis u = GrpeBasisRpe(n);
  for (int trial = 0; trial < 40; ++trial) {
    const int n0 = 1 + trial % n;
    Eigen::VectorXd p_star(n);
    for (int k = 0; k < n; ++k) p_star(k) = keep(rng) ? g(rng) : 0.0;
    const GrpeTrainResult r = GrpeTrain(u, p_star, n0);
    ASSERT_TRUE(r.converged);
    const Eigen::MatrixXd a = GrpeMatrix(u, r.p);
    const Eigen::MatrixXd b = GrpeMatrix(u, p_star);
    double worst = 0.0;
    for (uint32_t m = 0; m < (1u << n); ++m) {
      worst = std::max(worst, std::abs(ldhd::testing::NaivePlaa(a, m) -
                                       ldhd::testing::NaivePlaa(b, m)));
    }
    EXPECT_EQ(CorollaryPredicate(u, p_star, n0), worst < 1e-6) << trial << " " << worst;
  }
}

}  // namespace
