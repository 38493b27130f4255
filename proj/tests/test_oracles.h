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

// Straight-line reference implementations used only by tests. None of them
// call into the library beyond plain data types.

#ifndef LDHD_TESTS_TEST_ORACLES_H_
#define LDHD_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace ldhd::testing {

// x_{i+1} at table index m: bit i set means -1.
inline int Coord(uint32_t m, int i) { return ((m >> i) & 1u) ? -1 : 1; }

inline double Chi(uint32_t subset, uint32_t m, int n) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    if ((subset >> i) & 1u) v *= Coord(m, i);
  }
  return v;
}

// f^(T) by the defining average, no butterfly.
inline double NaiveFourier(const std::vector<double>& f, int n, uint32_t subset) {
  double s = 0.0;
  for (uint32_t m = 0; m < f.size(); ++m) s += f[m] * Chi(subset, m, n);
  return s / static_cast<double>(f.size());
}

// n(x) by scanning from the top coordinate.
inline int NaiveAdvice(uint32_t m, int n) {
  for (int i = n; i >= 1; --i) {
    if (Coord(m, i - 1) == -1) return i;
  }
  return 0;
}

// <x e_{n(x)}^T, A> = sum_i x_i A_{i, n(x)}.
inline double NaivePlaa(const Eigen::MatrixXd& a, uint32_t m) {
  const int n = static_cast<int>(a.rows());
  const int j = NaiveAdvice(m, n);
  if (j == 0) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= j; ++i) s += Coord(m, i - 1) * a(i - 1, j - 1);
  return s;
}

// 1/2 * mean over X_{N0} of (f_a - f_b)^2 in n dimensions.
inline double NaivePlaaLoss(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int n0) {
  const uint32_t count = uint32_t{1} << n0;
  double s = 0.0;
  for (uint32_t m = 0; m < count; ++m) {
    const double e = NaivePlaa(a, m) - NaivePlaa(b, m);
    s += e * e;
  }
  return 0.5 * s / count;
}

// Row-wise softmax of query j over keys l <= j, zero above.
inline Eigen::MatrixXd NaiveAttention(const Eigen::MatrixXd& emb, const Eigen::MatrixXd& wq,
                                      const Eigen::MatrixXd& wk) {
  const int n = static_cast<int>(emb.cols());
  Eigen::MatrixXd att = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd q = wq * emb.col(j);
    std::vector<double> logits(j + 1);
    double top = -INFINITY;
    for (int l = 0; l <= j; ++l) {
      logits[l] = q.dot(wk * emb.col(l));
      top = std::max(top, logits[l]);
    }
    double z = 0.0;
    for (int l = 0; l <= j; ++l) z += std::exp(logits[l] - top);
    for (int l = 0; l <= j; ++l) att(j, l) = std::exp(logits[l] - top) / z;
  }
  return att;
}

// r_at(delta) supplies R_delta.
template <typename R>
Eigen::MatrixXd NaiveRpeSquare(const Eigen::MatrixXd& att, R&& r_at) {
  const int n = static_cast<int>(att.rows());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      double s = 0.0;
      for (int l = 0; l <= j; ++l) {
        for (int k = 0; k <= i; ++k) s += att(j, l) * att(i, k) * r_at((j - l) - (i - k));
      }
      b(i, j) = s;
    }
  }
  return b;
}

inline std::string Reverse(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

inline std::string SpaceDigits(const std::string& digits) {
  std::string out;
  for (char c : digits) {
    if (!out.empty()) out += ' ';
    out += c;
  }
  return out;
}

inline std::vector<std::string> Split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

// Expected target text of an arithmetic record, computed from its input text
// with arbitrary precision; empty when the input is not understood.
// Decimal only; cpp_int reads a leading 0 as octal.
inline boost::multiprecision::cpp_int Decimal(const std::string& digits) {
  const std::size_t first = digits.find_first_not_of('0');
  return boost::multiprecision::cpp_int(first == std::string::npos ? "0" : digits.substr(first));
}

inline std::string BigIntTarget(const std::string& task, const std::string& input) {
  using boost::multiprecision::cpp_int;
  const std::vector<std::string> tok = Split(input);
  if (tok.size() < 4 || tok.front() != "b" || tok.back() != "=") return "";
  std::string a, b;
  std::string op;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    if (tok[i] == "+" || tok[i] == "*" || tok[i] == "\\") {
      op = tok[i];
    } else {
      (op.empty() ? a : b) += tok[i];
    }
  }
  if (task == "urf-add" || task == "arf-add" || task == "add-mod10") {
    const cpp_int x = Decimal(Reverse(a));
    const cpp_int y = Decimal(Reverse(b));
    if (task == "add-mod10") {
      return std::to_string(static_cast<int>((a[0] - '0' + b[0] - '0') % 10)) + " e";
    }
    std::string z = Reverse(cpp_int(x + y).str());
    if (task == "arf-add") z.resize(a.size() + 1, '0');
    return SpaceDigits(z) + " e";
  }
  if (task == "mul-1n") {
    std::string z = Reverse(cpp_int(Decimal(a) * Decimal(Reverse(b))).str());
    z.resize(b.size() + 1, '0');
    return SpaceDigits(z) + " e";
  }
  if (task == "div-n1") {
    std::string z = cpp_int(Decimal(b) / Decimal(a)).str();
    z.insert(0, b.size() - std::min(b.size(), z.size()), '0');
    return SpaceDigits(z) + " e";
  }
  return "";
}

}  // namespace ldhd::testing

#endif  // LDHD_TESTS_TEST_ORACLES_H_
