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

#include "ldhd/verify.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "ldhd/boolean_core.h"
#include "ldhd/dataset.h"
#include "ldhd/interpolator.h"
#include "ldhd/pe_kernels.h"
#include "ldhd/plaa.h"
#include "ldhd/rfmp.h"
#include "ldhd/tasks.h"

namespace ldhd::cli {

namespace {

using boolean::Basis;
using boolean::HypercubePoint;
using boolean::SubcubeSpec;
using boolean::TableFunction;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

class Gauss {
 public:
  explicit Gauss(uint64_t seed) : gen_(seed) {}

  double operator()() { return normal_(gen_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  MatrixXd Matrix(int rows, int cols) {
    MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = (*this)();
    }
    return m;
  }
  MatrixXd Upper(int n) {
    MatrixXd m = Matrix(n, n);
    m.triangularView<Eigen::StrictlyLower>().setZero();
    return m;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
};

double MaxAbsDiff(const TableFunction& a, const TableFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string Str(double v) { return FormatNumber(v); }
std::string Str(int64_t v) { return std::to_string(v); }

// Concept depending on two random coordinates with Gaussian Fourier weights
// on every subset of them.
TableFunction Random2Sparse(int n, Gauss& g) {
  const int i = g.Int(0, n - 1);
  int j = g.Int(0, n - 2);
  if (j >= i) ++j;
  const uint32_t bi = uint32_t{1} << i;
  const uint32_t bj = uint32_t{1} << j;
  std::vector<double> coef(std::size_t{1} << n, 0.0);
  coef[0] = g();
  coef[bi] = g();
  coef[bj] = g();
  coef[bi | bj] = g();
  return boolean::InverseWalshTransform(boolean::FourierCoefficients(n, std::move(coef)));
}

// ---- rfmp ----

void RfmpExample(const RfmpSuiteOptions& o, VerificationReport& r) {
  const SubcubeSpec spec{2, 1};
  const TableFunction concept_fn = TableFunction::FromPoints(
      2, [](const HypercubePoint& x) { return 4.0 * x[0] + 3.0 * x[1]; });
  const std::vector<double> targets = oracle::RestrictToSubcube(concept_fn, spec);
  MatrixXd rotation(2, 2);
  rotation << 0.8, 0.6, 0.6, -0.8;

  struct Case {
    std::string name;
    MatrixXd v;
    TableFunction reference;
  };
  const std::vector<Case> cases = {
      {"identity", MatrixXd::Identity(2, 2), 4.0 * TableFunction::Coordinate(2, 1)},
      {"rotation", rotation, concept_fn}};

  std::vector<int> ks = o.k_ladder;
  if (std::find(ks.begin(), ks.end(), o.k) == ks.end()) ks.push_back(o.k);
  std::sort(ks.begin(), ks.end());

  const rfmp::GdOptions gd{o.lr, o.max_steps, o.loss_tol};
  Table table{"rfmp_example", {"case", "k", "seed", "sup_deviation", "loss", "steps"}, {}};
  double worst_loss = 0.0;

  for (const Case& c : cases) {
    const Basis basis = boolean::ProjectedBasis(c.v);
    const TableFunction oracle_fn =
        basis.Combine(oracle::MinDegreeInterpolator({spec, &basis, targets}));
    r.notes.push_back(c.name + ": min-degree interpolator in the projected basis deviates by " +
                      Str(MaxAbsDiff(oracle_fn, c.reference)) + " from the reference function");

    std::vector<double> medians;
    for (int k : ks) {
      std::vector<double> dev(o.seeds, kInf), loss(o.seeds, kInf);
      std::vector<int64_t> steps(o.seeds, 0);
      ParallelFor(o.seeds, o.threads, [&](int s) {
        try {
          const rfmp::FeatureSet f =
              rfmp::SampleFeatures(k, 2, rfmp::Activation::kExp, o.seed + s);
          const rfmp::GdResult res = rfmp::TrainGd(f, c.v, spec, targets, gd);
          dev[s] = MaxAbsDiff(rfmp::ForwardTable(f, c.v, res.a), c.reference);
          loss[s] = res.loss;
          steps[s] = res.steps;
        } catch (const Error&) {
          // left at infinity so the checks fail
        }
      });
      for (int s = 0; s < o.seeds; ++s) {
        table.rows.push_back({c.name, Str(int64_t{k}), Str(static_cast<int64_t>(o.seed + s)),
                              Str(dev[s]), Str(loss[s]), Str(steps[s])});
        worst_loss = std::max(worst_loss, loss[s]);
      }
      medians.push_back(Median(dev));
      if (k == o.k) {
        r.AtMost(c.name + ": seed-averaged sup deviation at K=" + std::to_string(k), Mean(dev),
                 o.threshold);
      }
    }
    double rise = -kInf;
    for (std::size_t i = 1; i < medians.size(); ++i) {
      rise = std::max(rise, medians[i] - medians[i - 1]);
    }
    if (medians.size() > 1) {
      r.AtMost(c.name + ": largest rise of the median deviation along the K ladder", rise, 0.0);
    }
  }
  r.AtMost("largest final training loss", worst_loss, o.loss_tol);

  // The GD limit and its step-size dependence, trained well past loss_tol.
  const rfmp::FeatureSet f = rfmp::SampleFeatures(o.k, 2, rfmp::Activation::kExp, o.seed);
  const MatrixXd v = MatrixXd::Identity(2, 2);
  rfmp::GdOptions tight = gd;
  tight.loss_tol = 1e-20;
  double gd_vs_min_norm = kInf;
  double lr_halving = kInf;
  try {
    const TableFunction full = rfmp::ForwardTable(f, v, rfmp::TrainGd(f, v, spec, targets, tight).a);
    const TableFunction min_norm =
        rfmp::ForwardTable(f, v, rfmp::MinNormAmplitudes(f, v, spec, targets));
    rfmp::GdOptions half = tight;
    half.lr /= 2;
    half.max_steps *= 2;
    const TableFunction halved =
        rfmp::ForwardTable(f, v, rfmp::TrainGd(f, v, spec, targets, half).a);
    gd_vs_min_norm = MaxAbsDiff(full, min_norm);
    lr_halving = MaxAbsDiff(full, halved);
  } catch (const Error& e) {
    r.notes.push_back(std::string("GD limit check failed: ") + e.what());
  }
  r.AtMost("GD limit vs min-norm amplitudes, sup over X_N", gd_vs_min_norm, 1e-6);
  r.AtMost("GD under lr halving, sup over X_N", lr_halving, 1e-6);
  r.tables.push_back(std::move(table));
}

void RfmpSparse(const RfmpSuiteOptions& o, VerificationReport& r) {
  const SubcubeSpec spec{4, 3};
  const MatrixXd v = MatrixXd::Identity(4, 4);
  Gauss g(o.seed);
  std::vector<TableFunction> concepts;
  for (int c = 0; c < o.concepts; ++c) concepts.push_back(Random2Sparse(4, g));
  std::vector<double> dev(o.concepts, kInf), l2(o.concepts, kInf);
  ParallelFor(o.concepts, o.threads, [&](int c) {
    try {
      const rfmp::FeatureSet f =
          rfmp::SampleFeatures(o.k, 4, rfmp::Activation::kExp, o.seed + 1000 + c);
      const rfmp::OracleComparison cmp =
          rfmp::CompareWithOracle(f, v, spec, concepts[c], rfmp::Solver::kMinNorm);
      dev[c] = cmp.sup_deviation;
      l2[c] = cmp.l2_deviation;
    } catch (const Error&) {
    }
  });
  Table table{"rfmp_sparse", {"concept", "sup_deviation", "l2_deviation"}, {}};
  int within = 0;
  for (int c = 0; c < o.concepts; ++c) {
    if (dev[c] <= o.threshold) ++within;
    table.rows.push_back({Str(int64_t{c}), Str(dev[c]), Str(l2[c])});
  }
  r.notes.push_back("2-sparse concepts: median sup deviation from the oracle " + Str(Median(dev)));
  r.AtLeast("fraction of 2-sparse concepts within " + Str(o.threshold) + " of the oracle",
            o.concepts > 0 ? static_cast<double>(within) / o.concepts : 0.0, o.fraction);
  r.tables.push_back(std::move(table));
}

// ---- pe ----

// Attention one-hot on key t[j] for query j: one-hot positional embeddings,
// W_K = I and column j of W_Q equal to scale * e_{t[j]}.
pe::PeInputs OneHotInputs(const std::vector<int>& t, double scale, const pe::RelTable& r) {
  const int n = static_cast<int>(t.size());
  pe::PeInputs in;
  in.embeddings = MatrixXd::Identity(n, n);
  in.w.wk = MatrixXd::Identity(n, n);
  in.w.wq = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) in.w.wq(t[j], j) = scale;
  in.r = r;
  return in;
}

pe::RelTable RandomRelTable(int window, Gauss& g) {
  std::vector<double> values(2 * window - 1);
  for (double& x : values) x = g();
  return pe::RelTable(window, std::move(values));
}

double UpperMaxDiff(const MatrixXd& a, const MatrixXd& b) {
  double m = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i <= j; ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  }
  return m;
}

int VocabIndex(const std::string& tok) {
  const auto it = std::find(tasks::kVocabulary.begin(), tasks::kVocabulary.end(), tok);
  return static_cast<int>(it - tasks::kVocabulary.begin());
}

// Every query attends to the latest of the heaviest special tokens b < + < =
// so that z_t's query sees x_t and y_t at offset -1.
double SpecialTokenFixtureError(const tasks::TaskInstance& inst, double scale) {
  std::vector<std::string> seq = inst.input_tokens;
  seq.insert(seq.end(), inst.target_tokens.begin(), inst.target_tokens.end());
  const int n = static_cast<int>(seq.size());
  const int d = static_cast<int>(tasks::kVocabulary.size());
  pe::PeInputs in;
  in.embeddings = MatrixXd::Zero(d, n);
  for (int l = 0; l < n; ++l) in.embeddings(VocabIndex(seq[l]), l) = 1.0;
  in.w.wk = MatrixXd::Zero(d, d);
  in.w.wk(0, VocabIndex("b")) = 1.0;
  in.w.wk(0, VocabIndex("+")) = 2.0;
  in.w.wk(0, VocabIndex("=")) = 3.0;
  in.w.wq = MatrixXd::Zero(d, d);
  in.w.wq.row(0).setConstant(scale);
  in.r = pe::RelTable::Zero(n);
  in.r.mutable_at(-1) = 1.0;
  const pe::BiasMatrix b = pe::RpeSquareBias(in.embeddings, in.w, in.r);

  const int plus = static_cast<int>(std::find(seq.begin(), seq.end(), "+") - seq.begin());
  const int eq = static_cast<int>(std::find(seq.begin(), seq.end(), "=") - seq.begin());
  const int x_len = plus - 1;
  const int y_len = eq - plus - 1;
  double err = 0.0;
  for (int j = eq; j < n; ++j) {
    const int t = j - eq;
    for (int i = 0; i <= j; ++i) {
      const bool aligned = (t < x_len && i == 1 + t) || (t < y_len && i == plus + 1 + t);
      err = std::max(err, std::abs(b(i, j) - (aligned ? 1.0 : 0.0)));
    }
  }
  return err;
}

// ---- tasks ----

std::string Reversed(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

// Independent check of a URF record with arbitrary-precision integers.
bool UrfRecordCorrect(const tasks::DatasetRecord& rec) {
  using boost::multiprecision::cpp_int;
  std::istringstream in(rec.input);
  std::string tok, x, y;
  in >> tok;
  if (tok != "b") return false;
  std::string* cur = &x;
  bool closed = false;
  while (in >> tok) {
    if (closed) return false;
    if (tok == "+") {
      if (cur == &y) return false;
      cur = &y;
    } else if (tok == "=") {
      closed = true;
    } else if (tok.size() == 1 && tok[0] >= '0' && tok[0] <= '9') {
      *cur += tok;
    } else {
      return false;
    }
  }
  if (!closed || x.empty() || y.empty()) return false;
  if (x.back() == '0' || y.back() == '0') return false;  // reversed: no leading zeros
  const cpp_int sum = cpp_int(Reversed(x)) + cpp_int(Reversed(y));
  std::string expected;
  for (char ch : Reversed(sum.str())) {
    if (!expected.empty()) expected += ' ';
    expected += ch;
  }
  expected += " e";
  const int scale = static_cast<int>(std::max(x.size(), y.size()));
  return rec.target == expected && rec.scale == scale;
}

}  // namespace

void ParallelFor(int count, int threads, const std::function<void(int)>& job) {
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) job(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

VerificationReport VerifyRfmp(const RfmpSuiteOptions& o) {
  VerificationReport r;
  r.suite = "rfmp";
  r.seed = o.seed;
  if (o.preset != "example-4-1" && o.preset != "sparse" && o.preset != "all") {
    throw Error(ErrorCode::kInvalidArgument, "unknown rfmp preset '" + o.preset + "'");
  }
  if (o.preset != "sparse") RfmpExample(o, r);
  if (o.preset != "example-4-1") RfmpSparse(o, r);
  return r;
}

VerificationReport VerifyOracle(const OracleSuiteOptions& o) {
  VerificationReport r;
  r.suite = "oracle";
  r.seed = o.seed;
  const SubcubeSpec spec{o.n, o.n0};
  spec.Validate();
  const Basis fourier = boolean::FourierBasis(o.n);
  const uint32_t inside = spec.subcube_size() - 1;
  Gauss g(o.seed);
  double worst = 0.0;
  double outside_mass = 0.0;
  int verdict_mismatch = 0;
  int escaping = 0;
  for (int c = 0; c < o.concepts; ++c) {
    const TableFunction f = Random2Sparse(o.n, g);
    const std::vector<double> targets = oracle::RestrictToSubcube(f, spec);
    const boolean::CoefficientVector seq = oracle::MinDegreeInterpolator({spec, &fourier, targets});
    const boolean::FourierCoefficients closed = oracle::FourierMinDegreeClosedForm(targets, spec);
    for (uint32_t t = 0; t < spec.cube_size(); ++t) {
      worst = std::max(worst, std::abs(seq(t) - closed[t]));
      if ((t & ~inside) != 0) outside_mass = std::max(outside_mass, std::abs(seq(t)));
    }
    const oracle::GeneralizationReport rep =
        oracle::MakeGeneralizationReport(fourier.Combine(seq), f, spec);
    const bool escapes = (boolean::SupportMask(f, boolean::kRankTolerance) & ~inside) != 0;
    const bool test_error = rep.test.max > boolean::kRankTolerance;
    if (escapes) ++escaping;
    if (escapes != test_error) ++verdict_mismatch;
  }
  r.AtMost("sequential solver vs Fourier closed form, max coefficient gap", worst, o.threshold);
  r.AtMost("largest oracle coefficient outside [N0]", outside_mass, boolean::kRankTolerance);
  r.Equals("concepts where I(c) escapes [N0] without test error (or vice versa)",
           verdict_mismatch, 0);
  r.notes.push_back(std::to_string(escaping) + " of " + std::to_string(o.concepts) +
                    " concepts depend on a coordinate outside [N0]");
  return r;
}

VerificationReport VerifyNfl(const NflSuiteOptions& o) {
  VerificationReport r;
  r.suite = "nfl";
  r.seed = o.seed;
  const SubcubeSpec spec{o.n, o.n0};
  spec.Validate();
  oracle::FiniteLabelSet y;
  for (int a = 0; a < o.labels; ++a) y.labels.push_back(a);
  const oracle::LossSpec loss = oracle::LossSpec::ZeroOne(o.labels);
  const uint64_t count = oracle::NflInterpolatorCount(spec, o.labels);
  const double per_point = static_cast<double>(count) * (o.labels - 1) / o.labels;

  std::mt19937_64 gen(o.seed);
  std::uniform_int_distribution<int> label(0, o.labels - 1);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  double gap = 0.0;
  double closed_gap = 0.0;
  for (int p = 0; p < o.pairs; ++p) {
    std::vector<int> c1(spec.cube_size()), c2(spec.cube_size());
    for (uint32_t m = 0; m < spec.cube_size(); ++m) {
      c1[m] = label(gen);
      c2[m] = spec.Contains(m) ? c1[m] : label(gen);
    }
    for (int k = 0; k < o.distributions; ++k) {
      oracle::DistributionSpec d;
      double total = 0.0;
      for (uint32_t m = 0; m < spec.cube_size(); ++m) {
        d.weights.push_back(weight(gen));
        total += d.weights.back();
      }
      for (double& w : d.weights) w /= total;
      const double s1 = oracle::NflInterpolatorSum(c1, spec, y, loss, d, o.threads);
      const double s2 = oracle::NflInterpolatorSum(c2, spec, y, loss, d, o.threads);
      // Each free point is wrong under a fraction (|Y|-1)/|Y| of interpolators.
      double closed = 0.0;
      for (uint32_t m = spec.subcube_size(); m < spec.cube_size(); ++m) {
        closed += d.weights[m] * per_point;
      }
      gap = std::max(gap, std::abs(s1 - s2));
      closed_gap = std::max({closed_gap, std::abs(s1 - closed), std::abs(s2 - closed)});
    }
  }
  r.AtMost("max |S(c1) - S(c2)|", gap, o.threshold);
  r.AtMost("max |S(c) - counting formula|", closed_gap, o.threshold);
  return r;
}

VerificationReport VerifyPlaaLoss(const PlaaLossSuiteOptions& o) {
  VerificationReport r;
  r.suite = "plaa-loss";
  r.seed = o.seed;
  Gauss g(o.seed);
  double worst = 0.0;
  double ape_worst = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    const int n = g.Int(1, o.max_n);
    const int n0 = g.Int(0, n);
    const MatrixXd p = g.Matrix(n + g.Int(0, 2), n);
    const MatrixXd a_star = g.Upper(n);
    const MatrixXd a = plaa::ApeMatrix(p);
    const double enumerated = plaa::EnumeratedLoss(a, a_star, n0);
    worst = std::max(worst, std::abs(plaa::ClosedFormLoss(a, a_star, n0) - enumerated));
    ape_worst = std::max(ape_worst, std::abs(plaa::ApeLoss(p, a_star, n0) - enumerated));
  }
  r.AtMost("closed-form vs enumerated loss", worst, o.threshold);
  r.AtMost("APE loss vs enumerated loss", ape_worst, o.threshold);

  int64_t wrong = 0;
  for (int n0 = 1; n0 <= o.max_counting_n0; ++n0) {
    std::vector<int64_t> by_index(n0 + 1, 0), by_point(n0 + 1, 0);
    for (uint32_t m = 0; m < (uint32_t{1} << n0); ++m) {
      ++by_index[plaa::AdviceOfIndex(m)];
      ++by_point[plaa::Advice(HypercubePoint::FromIndex(m, n0))];
    }
    if (by_index[0] != 1 || by_point[0] != 1) ++wrong;
    for (int k = 1; k <= n0; ++k) {
      const int64_t expected = int64_t{1} << (k - 1);
      if (by_index[k] != expected) ++wrong;
      if (by_point[k] != expected) ++wrong;
    }
  }
  r.Equals("counting identity |{x : n(x) = k}| = 2^(k-1) violations", static_cast<double>(wrong),
           0.0);
  return r;
}

VerificationReport VerifyPlaaIdentity(const PlaaIdentitySuiteOptions& o) {
  VerificationReport r;
  r.suite = "plaa-identity";
  r.seed = o.seed;
  Gauss g(o.seed);
  double worst = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    const int n = 1 + t % o.max_n;
    const MatrixXd u = g.Upper(n);
    std::vector<double> expanded(std::size_t{1} << n, 0.0);
    for (int j = 1; j <= n; ++j) {
      for (int i = 1; i <= j; ++i) {
        const TableFunction b = boolean::PlaaBasisFunction(n, i, j);
        for (std::size_t m = 0; m < expanded.size(); ++m) expanded[m] += u(i - 1, j - 1) * b[m];
      }
    }
    for (uint32_t m = 0; m < expanded.size(); ++m) {
      const HypercubePoint x = HypercubePoint::FromIndex(m, n);
      worst = std::max(worst, std::abs(plaa::PlaaForward(u, x) - expanded[m]));
      worst = std::max(worst, std::abs(plaa::PlaaForwardIndex(u, m) - expanded[m]));
    }
  }
  r.AtMost("<x e_n(x)^T, U> vs sum U_ij b_ij", worst, o.threshold);
  return r;
}

VerificationReport VerifyPlaaApe(const PlaaApeSuiteOptions& o) {
  VerificationReport r;
  r.suite = "plaa-ape";
  r.seed = o.seed;
  const int d_p = o.d_p > 0 ? o.d_p : o.n;
  plaa::GdOptions gd;
  gd.lr = o.lr;
  gd.max_steps = o.max_steps;
  plaa::GdOptions half = gd;
  half.lr /= 2;
  half.max_steps *= 2;
  const double smallest = *std::min_element(o.ladder.begin(), o.ladder.end());

  std::vector<MatrixXd> targets;
  for (int t = 0; t < o.targets; ++t) targets.push_back(plaa::RandomApeTarget(o.n, o.n0, o.seed + t));
  std::vector<plaa::AlphaLimitReport> reports(o.targets);
  std::vector<double> halving(o.targets, kInf);
  std::vector<std::string> failures(o.targets);
  ParallelFor(o.targets, o.threads, [&](int t) {
    try {
      reports[t] = plaa::ApeAlphaLimit(targets[t], o.n0, d_p, o.ladder, gd);
      const plaa::ApeTrainResult slow = plaa::ApeTrain(targets[t], o.n0, d_p, smallest, half);
      halving[t] = (plaa::ApeMatrix(slow.p) - reports[t].a_hat).cwiseAbs().maxCoeff();
    } catch (const Error& e) {
      failures[t] = e.what();
    }
  });

  Table table{"ape_alpha_ladder",
              {"target", "alpha", "loss", "steps", "converged", "columns_frozen", "deviation_sq",
               "bound", "block_error"},
              {}};
  int not_frozen = 0;
  int not_converged = 0;
  int missing = 0;
  double ratio = 0.0;
  double block = 0.0;
  double lr_gap = 0.0;
  for (int t = 0; t < o.targets; ++t) {
    if (!failures[t].empty()) {
      ++missing;
      r.notes.push_back("target " + std::to_string(t) + ": " + failures[t]);
      continue;
    }
    for (const plaa::AlphaRun& run : reports[t].runs) {
      if (!run.columns_frozen) ++not_frozen;
      if (!run.converged) ++not_converged;
      const double q = run.bound > 0.0 ? run.deviation_sq / run.bound
                                       : (run.deviation_sq == 0.0 ? 0.0 : kInf);
      ratio = std::max(ratio, q);
      if (run.alpha == smallest) block = std::max(block, run.block_error);
      table.rows.push_back({Str(int64_t{t}), Str(run.alpha), Str(run.loss), Str(run.steps),
                            run.converged ? "1" : "0", run.columns_frozen ? "1" : "0",
                            Str(run.deviation_sq), Str(run.bound), Str(run.block_error)});
    }
    lr_gap = std::max(lr_gap, halving[t]);
  }
  r.Equals("targets whose training raised an error", missing, 0);
  r.Equals("runs with a moved column i > N0", not_frozen, 0);
  r.AtMost("max deviation^2 / bound over the ladder", ratio, 1.0);
  r.AtMost("block error at alpha=" + Str(smallest), block, o.threshold);
  r.AtMost("M o P^T P change under lr halving at alpha=" + Str(smallest), lr_gap, o.threshold);
  if (not_converged > 0) {
    r.notes.push_back(std::to_string(not_converged) +
                      " runs stopped on the gradient norm or step cap before the loss reached "
                      "its tolerance");
  } else {
    r.notes.push_back("every run drove the loss to its tolerance");
  }
  r.tables.push_back(std::move(table));
  return r;
}

VerificationReport VerifyPlaaGrpe(const PlaaGrpeSuiteOptions& o) {
  VerificationReport r;
  r.suite = "plaa-grpe";
  r.seed = o.seed;
  const plaa::GrpeBasis u = plaa::GrpeBasisRpe(o.n);
  const int dims = static_cast<int>(u.size());
  std::vector<VectorXd> stars = {VectorXd::Zero(dims), VectorXd::Ones(dims)};
  Gauss g(o.seed);
  for (int s = 0; s < o.random; ++s) {
    VectorXd p(dims);
    for (int k = 0; k < dims; ++k) p(k) = g.Uniform(0.0, 1.0) < 0.5 ? 0.0 : g();
    stars.push_back(p);
  }
  plaa::GdOptions gd = plaa::DefaultGrpeOptions();
  gd.lr = o.lr;
  gd.max_steps = o.max_steps;

  double worst = 0.0;
  int mismatched = 0;
  int predicate_true = 0;
  int not_converged = 0;
  for (const VectorXd& p_star : stars) {
    const plaa::GrpeTrainResult res = plaa::GrpeTrain(u, p_star, o.n0, gd);
    if (!res.converged) ++not_converged;
    worst = std::max(worst,
                     (res.p - plaa::GrpeClosedForm(u, p_star, o.n0)).cwiseAbs().maxCoeff());
    double gap = 0.0;
    for (uint32_t m = 0; m < (uint32_t{1} << o.n); ++m) {
      const HypercubePoint x = HypercubePoint::FromIndex(m, o.n);
      gap = std::max(gap, std::abs(plaa::GrpeForward(u, res.p, x) -
                                   plaa::GrpeForward(u, p_star, x)));
    }
    const bool predicate = plaa::CorollaryPredicate(u, p_star, o.n0);
    if (predicate) ++predicate_true;
    if (predicate != (gap <= o.agreement_tol)) ++mismatched;
  }
  r.AtMost("trained p vs closed form", worst, o.threshold);
  r.Equals("predicate vs exhaustive agreement, mismatched verdicts", mismatched, 0);
  r.Equals("runs stopped by the step cap", not_converged, 0);
  r.notes.push_back("predicate holds for " + std::to_string(predicate_true) + " of " +
                    std::to_string(stars.size()) + " concepts");
  return r;
}

VerificationReport VerifyPe(const PeSuiteOptions& o) {
  VerificationReport r;
  r.suite = "pe";
  r.seed = o.seed;
  Gauss g(o.seed);

  double onehot_first = 0.0;
  double onehot_random = 0.0;
  double naive = 0.0;
  int64_t not_constant = 0;
  int64_t outside_range = 0;
  for (int n = 1; n <= o.max_n; ++n) {
    const pe::RelTable rel = RandomRelTable(n, g);
    const pe::BiasMatrix rpe = pe::RpeBias(rel, n);
    const std::vector<int> first(n, 0);
    pe::PeInputs in = OneHotInputs(first, o.logit_scale, rel);
    onehot_first = std::max(
        onehot_first, UpperMaxDiff(pe::RpeSquareBias(in.embeddings, in.w, in.r), rpe));

    std::vector<int> target(n);
    for (int j = 0; j < n; ++j) target[j] = g.Int(0, j);
    in = OneHotInputs(target, o.logit_scale, rel);
    const pe::BiasMatrix b = pe::RpeSquareBias(in.embeddings, in.w, in.r);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) {
        const double expected = rel.at((j - target[j]) - (i - target[i]));
        onehot_random = std::max(onehot_random, std::abs(b(i, j) - expected));
      }
    }

    const pe::PeInputs rnd = pe::RandomPeInputs(o.d, n, n, o.seed + n);
    const pe::BiasMatrix fast = pe::RpeSquareBias(rnd.embeddings, rnd.w, rnd.r);
    naive = std::max(naive, UpperMaxDiff(fast, pe::RpeSquareBiasNaive(rnd.embeddings, rnd.w,
                                                                      rnd.r)));
    const auto [lo, hi] = std::minmax_element(rnd.r.values().begin(), rnd.r.values().end());
    const pe::BiasMatrix absolute = pe::RpeAbsoluteBias(rnd.embeddings, rnd.w, rnd.r);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) {
        if (absolute(i, j) != absolute(i, i)) ++not_constant;
        if (fast(i, j) < *lo - 1e-12 || fast(i, j) > *hi + 1e-12) ++outside_range;
      }
    }
  }
  r.AtMost("one-hot on the first position: RPE-Square vs RPE", onehot_first, o.onehot_threshold);
  r.AtMost("one-hot on random positions: RPE-Square vs single R entry", onehot_random,
           o.onehot_threshold);
  r.AtMost("offset histogram vs quadruple sum", naive, o.naive_threshold);
  r.Equals("RPE-Absolute entries differing from their row", static_cast<double>(not_constant),
           0.0);
  r.Equals("RPE-Square entries outside [min R, max R]", static_cast<double>(outside_range), 0.0);

  double square = 0.0;
  double absolute = 0.0;
  double rpe = 0.0;
  for (int t = 0; t < o.gradcheck_trials; ++t) {
    const pe::PeInputs in =
        pe::RandomPeInputs(o.d, o.gradcheck_n, o.gradcheck_n, o.seed + 100 + t);
    square = std::max(square, pe::FiniteDiffGradcheck(pe::Kernel::kRpeSquare, in, o.eps).max_error);
    absolute =
        std::max(absolute, pe::FiniteDiffGradcheck(pe::Kernel::kRpeAbsolute, in, o.eps).max_error);
    rpe = std::max(rpe, pe::FiniteDiffGradcheck(pe::Kernel::kRpe, in, o.eps).max_error);
  }
  r.AtMost("RPE-Square gradient check", square, o.threshold);
  r.AtMost("RPE-Absolute gradient check", absolute, o.threshold);
  r.AtMost("RPE gradient check", rpe, 1e-10);

  tasks::Rng rng(o.seed, 7);
  double fixture = 0.0;
  for (int s = 0; s < 10; ++s) {
    const tasks::TaskInstance inst = tasks::SampleInstance(tasks::TaskKind::kUrfAddition, 5,
                                                           tasks::ScaleMode::kUpTo, rng);
    fixture = std::max(fixture, SpecialTokenFixtureError(inst, o.logit_scale));
  }
  r.AtMost("special-token fixture: z_t query singles out x_t and y_t", fixture,
           o.onehot_threshold);
  return r;
}

VerificationReport VerifyTasks(const TasksSuiteOptions& o) {
  VerificationReport r;
  r.suite = "tasks";
  r.seed = o.seed;
  tasks::EmitOptions e;
  e.task = tasks::TaskKind::kUrfAddition;
  e.scales = {o.max_scale};
  e.count = o.count;
  e.seed = o.seed;
  e.sampling = tasks::ScaleMode::kUpTo;
  e.threads = o.threads;
  const tasks::Dataset ds = tasks::EmitDataset(e);
  r.Equals("records emitted", static_cast<double>(ds.records.size()), o.count);
  int64_t oracle_fail = 0;
  int64_t round_trip_fail = 0;
  for (const tasks::DatasetRecord& rec : ds.records) {
    if (!UrfRecordCorrect(rec)) ++oracle_fail;
    if (!tasks::VerifyRecord(rec)) ++round_trip_fail;
  }
  r.Equals("records rejected by the big-integer oracle", static_cast<double>(oracle_fail), 0.0);
  r.Equals("records failing the format round trip", static_cast<double>(round_trip_fail), 0.0);

  auto serialize = [](const tasks::Dataset& d) {
    std::ostringstream out;
    tasks::WriteJsonl(out, d.records);
    return out.str() + tasks::ManifestToJson(d.manifest);
  };
  tasks::EmitOptions again = e;
  again.threads = std::max(2, o.threads);
  r.Holds("byte-identical regeneration", serialize(ds) == serialize(tasks::EmitDataset(again)));

  const tasks::TaskInstance longer =
      tasks::ParseInstance(tasks::TaskKind::kUrfAddition, "b 1 + 1 2 3 4 =", "2 2 3 4 e");
  const tasks::TaskInstance shorter =
      tasks::ParseInstance(tasks::TaskKind::kUrfAddition, "b 1 2 3 + 1 2 3 =", "2 4 6 e");
  r.Holds("larger scale with the shorter input (1+4321 vs 321+321)",
          longer.scale == 4 && shorter.scale == 3 &&
              longer.input_tokens.size() < shorter.input_tokens.size());

  // Addend lengths in up-to mode are uniform on {1..n}^2.
  const int n = o.length_max_scale;
  std::vector<int64_t> cells(n * n, 0);
  tasks::Rng rng(o.seed, 1000);
  for (int s = 0; s < o.length_samples; ++s) {
    const tasks::TaskInstance inst =
        tasks::SampleInstance(tasks::TaskKind::kUrfAddition, n, tasks::ScaleMode::kUpTo, rng);
    const auto& tok = inst.input_tokens;
    const int plus = static_cast<int>(std::find(tok.begin(), tok.end(), "+") - tok.begin());
    const int eq = static_cast<int>(std::find(tok.begin(), tok.end(), "=") - tok.begin());
    ++cells[(plus - 2) * n + (eq - plus - 2)];
  }
  const double p = 1.0 / (n * n);
  const double mean = o.length_samples * p;
  const double sigma = std::sqrt(o.length_samples * p * (1 - p));
  double z = 0.0;
  for (int64_t c : cells) z = std::max(z, std::abs(c - mean) / sigma);
  r.AtMost("addend length pairs, largest |z| over the grid", z, 3.0);
  return r;
}

}  // namespace ldhd::cli
