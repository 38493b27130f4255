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

#include "ldhd/pe_kernels.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ldhd::pe {

RelTable::RelTable(int window, std::vector<double> values)
    : window_(window), values_(std::move(values)) {
  if (window < 1) throw Error(ErrorCode::kInvalidArgument, "window must be at least 1");
  if (values_.size() != static_cast<std::size_t>(2 * window - 1)) {
    throw Error(ErrorCode::kDimensionMismatch, "RelTable needs 2L-1 values");
  }
}

RelTable RelTable::Zero(int window) {
  return RelTable(window, std::vector<double>(std::max(2 * window - 1, 1), 0.0));
}

int RelTable::IndexOf(int offset) const {
  if (offset <= -window_ || offset >= window_) {
    throw Error(ErrorCode::kWindowExceeded, "offset " + std::to_string(offset) +
                                                " outside window " + std::to_string(window_));
  }
  return offset + window_ - 1;
}

double RelTable::at(int offset) const { return values_[IndexOf(offset)]; }
double& RelTable::mutable_at(int offset) { return values_[IndexOf(offset)]; }

void RelTable::CheckCovers(int n) const {
  if (n > window_) {
    throw Error(ErrorCode::kWindowExceeded, "sequence length " + std::to_string(n) +
                                                " exceeds window " + std::to_string(window_));
  }
}

void ProjPair::Validate() const {
  if (wq.rows() != wq.cols() || wk.rows() != wk.cols() || wq.rows() != wk.rows() ||
      wq.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "W_Q and W_K must be d x d of the same d");
  }
}

Eigen::MatrixXd CausalAttention(const Eigen::MatrixXd& embeddings, const ProjPair& w) {
  w.Validate();
  if (embeddings.rows() != w.wq.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding width differs from d");
  }
  const Eigen::Index n = embeddings.cols();
  const Eigen::MatrixXd scores = (w.wq * embeddings).transpose() * (w.wk * embeddings);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double top = scores.row(j).head(j + 1).maxCoeff();
    double z = 0.0;
    for (Eigen::Index l = 0; l <= j; ++l) z += a(j, l) = std::exp(scores(j, l) - top);
    a.row(j).head(j + 1) /= z;
  }
  return a;
}

BiasMatrix RpeBias(const RelTable& r, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  r.CheckCovers(n);
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) b(i, j) = r.at(j - i);
  }
  return b;
}

namespace {

// p(j, u) = a(j, j - u) for u <= j.
Eigen::MatrixXd OffsetDistributions(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index u = 0; u <= j; ++u) p(j, u) = a(j, j - u);
  }
  return p;
}

// t(i, u) = sum_v p(i, v) R_{u - v}.
Eigen::MatrixXd Correlate(const Eigen::MatrixXd& p, const RelTable& r) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < n; ++u) {
      double s = 0.0;
      for (int v = 0; v <= i; ++v) s += p(i, v) * r.at(u - v);
      t(i, u) = s;
    }
  }
  return t;
}

void CheckInputs(const Eigen::MatrixXd& embeddings, const RelTable& r) {
  if (embeddings.cols() < 1) throw Error(ErrorCode::kInvalidArgument, "empty sequence");
  r.CheckCovers(static_cast<int>(embeddings.cols()));
}

}  // namespace

BiasMatrix RpeSquareBias(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                         const RelTable& r) {
  CheckInputs(embeddings, r);
  const Eigen::MatrixXd p = OffsetDistributions(CausalAttention(embeddings, w));
  const Eigen::MatrixXd t = Correlate(p, r);
  const Eigen::Index n = p.rows();
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      b(i, j) = p.row(j).head(j + 1).dot(t.row(i).head(j + 1));
    }
  }
  return b;
}

BiasMatrix RpeAbsoluteBias(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                           const RelTable& r) {
  CheckInputs(embeddings, r);
  const Eigen::MatrixXd a = CausalAttention(embeddings, w);
  const Eigen::Index n = a.rows();
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k <= i; ++k) s += a(i, k) * r.at(static_cast<int>(i - k));
    for (Eigen::Index j = i; j < n; ++j) b(i, j) = s;
  }
  return b;
}

BiasMatrix AlibiBias(double slope, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) b(i, j) = -slope * (j - i);
  }
  return b;
}

std::string_view KernelName(Kernel k) {
  switch (k) {
    case Kernel::kRpe: return "rpe";
    case Kernel::kRpeSquare: return "rpe-square";
    case Kernel::kRpeAbsolute: return "rpe-absolute";
    case Kernel::kAlibi: return "alibi";
  }
  return "unknown";
}

Kernel ParseKernel(std::string_view name) {
  for (Kernel k : {Kernel::kRpe, Kernel::kRpeSquare, Kernel::kRpeAbsolute, Kernel::kAlibi}) {
    if (KernelName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

BiasMatrix ComputeBias(Kernel kernel, const PeInputs& in) {
  switch (kernel) {
    case Kernel::kRpe: return RpeBias(in.r, in.length());
    case Kernel::kRpeSquare: return RpeSquareBias(in.embeddings, in.w, in.r);
    case Kernel::kRpeAbsolute: return RpeAbsoluteBias(in.embeddings, in.w, in.r);
    case Kernel::kAlibi: return AlibiBias(in.slope, in.length());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown kernel");
}

double SumBias(Kernel kernel, const PeInputs& in) {
  return ComputeBias(kernel, in).triangularView<Eigen::Upper>().toDenseMatrix().sum();
}

namespace {

// Backpropagates g_a(m, l) = dS/da(m, l) through the causal softmax into
// W_Q and W_K.
void SoftmaxBackward(const PeInputs& in, const Eigen::MatrixXd& a, const Eigen::MatrixXd& g_a,
                     BiasGradient& out) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double mean = a.row(m).head(m + 1).dot(g_a.row(m).head(m + 1));
    for (Eigen::Index l = 0; l <= m; ++l) g(m, l) = a(m, l) * (g_a(m, l) - mean);
  }
  const Eigen::MatrixXd& x = in.embeddings;
  const Eigen::MatrixXd q = in.w.wq * x;
  const Eigen::MatrixXd k = in.w.wk * x;
  out.d_wq = k * g.transpose() * x.transpose();
  out.d_wk = q * g * x.transpose();
}

}  // namespace

BiasGradient SumBiasGradient(Kernel kernel, const PeInputs& in) {
  const int n = in.length();
  const RelTable& r = in.r;
  BiasGradient out;
  out.d_r.assign(r.values().size(), 0.0);
  const Eigen::Index d = in.w.wq.rows();
  out.d_wq = Eigen::MatrixXd::Zero(d, d);
  out.d_wk = Eigen::MatrixXd::Zero(d, d);
  switch (kernel) {
    case Kernel::kRpe: {
      r.CheckCovers(n);
      for (int delta = 0; delta < n; ++delta) out.d_r[r.IndexOf(delta)] = n - delta;
      return out;
    }
    case Kernel::kRpeAbsolute: {
      CheckInputs(in.embeddings, r);
      const Eigen::MatrixXd a = CausalAttention(in.embeddings, in.w);
      Eigen::MatrixXd g_a = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k <= i; ++k) {
          out.d_r[r.IndexOf(i - k)] += (n - i) * a(i, k);
          g_a(i, k) = (n - i) * r.at(i - k);
        }
      }
      SoftmaxBackward(in, a, g_a, out);
      return out;
    }
    case Kernel::kRpeSquare: {
      CheckInputs(in.embeddings, r);
      const Eigen::MatrixXd a = CausalAttention(in.embeddings, in.w);
      const Eigen::MatrixXd p = OffsetDistributions(a);
      // Query side: sum_{i<=m} t(i, u), t(i, u) = sum_v p(i, v) R_{u-v}.
      const Eigen::MatrixXd t = Correlate(p, r);
      // Key side: sum_{j>=m} s(j, u), s(j, u) = sum_w p(j, w) R_{w-u}.
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
      for (int j = 0; j < n; ++j) {
        for (int u = 0; u < n; ++u) {
          double acc = 0.0;
          for (int w = 0; w <= j; ++w) acc += p(j, w) * r.at(w - u);
          s(j, u) = acc;
        }
      }
      Eigen::MatrixXd g_a = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd prefix = Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd suffix = Eigen::MatrixXd::Zero(n + 1, n);
      for (int j = n - 1; j >= 0; --j) suffix.row(j) = suffix.row(j + 1) + s.row(j);
      for (int m = 0; m < n; ++m) {
        prefix += t.row(m).transpose();
        for (int u = 0; u <= m; ++u) g_a(m, m - u) = prefix(u) + suffix(m, u);
      }
      // dS/dR_delta = sum_{i<=j} sum_{u-v=delta} p(j, u) p(i, v).
      Eigen::VectorXd cum = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        cum += p.row(j).transpose();
        for (int u = 0; u <= j; ++u) {
          if (p(j, u) == 0.0) continue;
          for (int v = 0; v < n; ++v) out.d_r[r.IndexOf(u - v)] += p(j, u) * cum(v);
        }
      }
      SoftmaxBackward(in, a, g_a, out);
      return out;
    }
    case Kernel::kAlibi:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "ALiBi has no R, W_Q or W_K gradient");
}

namespace {

double NormwiseError(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return scale < 1e-8 ? diff : diff / scale;
}

std::vector<double> Flatten(const Eigen::MatrixXd& m) {
  return {m.data(), m.data() + m.size()};
}

}  // namespace

GradcheckResult FiniteDiffGradcheck(Kernel kernel, const PeInputs& in, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must lie in [1e-7, 1e-3]");
  }
  const BiasGradient g = SumBiasGradient(kernel, in);
  PeInputs work = in;
  auto central = [&](double& slot) {
    const double saved = slot;
    slot = saved + eps;
    const double up = SumBias(kernel, work);
    slot = saved - eps;
    const double down = SumBias(kernel, work);
    slot = saved;
    return (up - down) / (2.0 * eps);
  };
  std::vector<double> num_r(g.d_r.size());
  for (std::size_t i = 0; i < num_r.size(); ++i) num_r[i] = central(work.r.mutable_values()[i]);
  std::vector<double> num_q(work.w.wq.size()), num_k(work.w.wk.size());
  for (Eigen::Index i = 0; i < work.w.wq.size(); ++i) num_q[i] = central(work.w.wq.data()[i]);
  for (Eigen::Index i = 0; i < work.w.wk.size(); ++i) num_k[i] = central(work.w.wk.data()[i]);
  GradcheckResult res;
  res.r_error = NormwiseError(g.d_r, num_r);
  res.wq_error = NormwiseError(Flatten(g.d_wq), num_q);
  res.wk_error = NormwiseError(Flatten(g.d_wk), num_k);
  res.max_error = std::max({res.r_error, res.wq_error, res.wk_error});
  return res;
}

std::string BiasToCsv(const BiasMatrix& b) {
  std::string out = "row,col,value\n";
  char buf[64];
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = i; j < b.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%ld,%ld,%.17g\n", static_cast<long>(i),
                    static_cast<long>(j), b(i, j) + 0.0);
      out += buf;
    }
  }
  return out;
}

BiasMatrix BiasFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "row,col,value") {
    throw Error(ErrorCode::kParseError, "missing CSV header row,col,value");
  }
  std::vector<std::tuple<long, long, double>> cells;
  long n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long i = 0, j = 0;
    double v = 0.0;
    int used = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf%n", &i, &j, &v, &used) != 3 ||
        used != static_cast<int>(line.size()) || i < 0 || j < i) {
      throw Error(ErrorCode::kParseError, "bad CSV line '" + line + "'");
    }
    cells.emplace_back(i, j, v);
    n = std::max(n, j + 1);
  }
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (const auto& [i, j, v] : cells) b(i, j) = v;
  return b;
}

PeInputs RandomPeInputs(int d, int n, int window, uint64_t seed) {
  if (d < 1 || n < 1) throw Error(ErrorCode::kInvalidArgument, "need d >= 1 and n >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PeInputs in;
  in.embeddings.resize(d, n);
  for (Eigen::Index i = 0; i < in.embeddings.size(); ++i) in.embeddings.data()[i] = normal(gen);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  in.w.wq.resize(d, d);
  in.w.wk.resize(d, d);
  for (Eigen::Index i = 0; i < in.w.wq.size(); ++i) in.w.wq.data()[i] = scale * normal(gen);
  for (Eigen::Index i = 0; i < in.w.wk.size(); ++i) in.w.wk.data()[i] = scale * normal(gen);
  std::vector<double> r(2 * window - 1);
  for (double& v : r) v = normal(gen);
  in.r = RelTable(window, std::move(r));
  return in;
}

namespace {

using nlohmann::json;

json Rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd FromRows(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorCode::kParseError, std::string(what) + " must be a nonempty array of rows");
  }
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw Error(ErrorCode::kParseError, std::string(what) + " rows differ in length");
    }
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

std::string PeInputsToJson(const PeInputs& in) {
  json j = {{"embeddings", Rows(in.embeddings.transpose())},
            {"wq", Rows(in.w.wq)},
            {"wk", Rows(in.w.wk)},
            {"r", in.r.values()},
            {"window", in.r.window()},
            {"slope", in.slope}};
  return j.dump(1) + "\n";
}

PeInputs PeInputsFromJson(const std::string& text) {
  PeInputs in;
  try {
    const json j = json::parse(text);
    in.embeddings = FromRows(j.at("embeddings"), "embeddings").transpose();
    in.w.wq = FromRows(j.at("wq"), "wq");
    in.w.wk = FromRows(j.at("wk"), "wk");
    in.r = RelTable(j.at("window").get<int>(), j.at("r").get<std::vector<double>>());
    if (j.contains("slope")) in.slope = j.at("slope").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad PE inputs: ") + e.what());
  }
  in.w.Validate();
  if (in.embeddings.rows() != in.w.wq.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding width differs from d");
  }
  return in;
}

}  // namespace ldhd::pe
