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

#include "ldhd/boolean_core.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

namespace ldhd::boolean {

void CheckDimension(int n) {
  if (n < 1 || n > kMaxDimension) {
    throw Error(ErrorCode::kInvalidArgument,
                "hypercube dimension must be in [1, 20], got " + std::to_string(n));
  }
}

HypercubePoint::HypercubePoint(std::vector<int> entries) : entries_(std::move(entries)) {
  CheckDimension(dimension());
  for (int e : entries_) {
    if (e != 1 && e != -1) {
      throw Error(ErrorCode::kInvalidArgument, "hypercube entries must be +1 or -1");
    }
  }
}

HypercubePoint HypercubePoint::FromIndex(uint32_t index, int n) {
  CheckDimension(n);
  std::vector<int> entries(n);
  for (int i = 0; i < n; ++i) entries[i] = (index >> i) & 1u ? -1 : 1;
  return HypercubePoint(std::move(entries));
}

uint32_t HypercubePoint::index() const {
  uint32_t m = 0;
  for (int i = 0; i < dimension(); ++i) {
    if (entries_[i] == -1) m |= uint32_t{1} << i;
  }
  return m;
}

TableFunction::TableFunction(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  CheckDimension(n);
  if (values_.size() != (std::size_t{1} << n)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "table length must be 2^N = " + std::to_string(1u << n));
  }
}

TableFunction TableFunction::Constant(int n, double c) {
  CheckDimension(n);
  return TableFunction(n, std::vector<double>(std::size_t{1} << n, c));
}

TableFunction TableFunction::Parity(int n, uint32_t subset) {
  CheckDimension(n);
  std::vector<double> values(std::size_t{1} << n);
  for (uint32_t m = 0; m < values.size(); ++m) {
    values[m] = std::popcount(subset & m) % 2 ? -1.0 : 1.0;
  }
  return TableFunction(n, std::move(values));
}

TableFunction TableFunction::Coordinate(int n, int i) {
  if (i < 1 || i > n) throw Error(ErrorCode::kInvalidArgument, "coordinate out of range");
  return Parity(n, uint32_t{1} << (i - 1));
}

double TableFunction::operator()(const HypercubePoint& x) const {
  if (x.dimension() != n_) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  return values_[x.index()];
}

TableFunction& TableFunction::operator+=(const TableFunction& other) {
  if (other.n_ != n_) throw Error(ErrorCode::kDimensionMismatch, "table dimension");
  for (std::size_t m = 0; m < values_.size(); ++m) values_[m] += other.values_[m];
  return *this;
}

TableFunction& TableFunction::operator-=(const TableFunction& other) {
  if (other.n_ != n_) throw Error(ErrorCode::kDimensionMismatch, "table dimension");
  for (std::size_t m = 0; m < values_.size(); ++m) values_[m] -= other.values_[m];
  return *this;
}

TableFunction& TableFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

TableFunction operator*(const TableFunction& a, const TableFunction& b) {
  if (a.n_ != b.n_) throw Error(ErrorCode::kDimensionMismatch, "table dimension");
  TableFunction out = a;
  for (std::size_t m = 0; m < out.values_.size(); ++m) out.values_[m] *= b.values_[m];
  return out;
}

void SubcubeSpec::Validate() const {
  CheckDimension(n);
  if (n0 < 0 || n0 > n) {
    throw Error(ErrorCode::kInvalidArgument, "subcube requires 0 <= N0 <= N");
  }
}

std::vector<HypercubePoint> SubcubePoints(const SubcubeSpec& spec) {
  spec.Validate();
  std::vector<HypercubePoint> points;
  points.reserve(spec.subcube_size());
  for (uint32_t m = 0; m < spec.subcube_size(); ++m) {
    points.push_back(HypercubePoint::FromIndex(m, spec.n));
  }
  return points;
}

FourierCoefficients::FourierCoefficients(int n, std::vector<double> coefficients)
    : n_(n), coefficients_(std::move(coefficients)) {
  CheckDimension(n);
  if (coefficients_.size() != (std::size_t{1} << n)) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient count must be 2^N");
  }
}

double FourierCoefficients::SquaredNorm() const {
  double s = 0.0;
  for (double c : coefficients_) s += c * c;
  return s;
}

namespace {

// Unnormalized in-place Walsh-Hadamard butterfly: out[T] = sum_m in[m] chi_T(m).
void Butterfly(std::vector<double>& a) {
  const std::size_t size = a.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t block = 0; block < size; block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        const double u = a[k];
        const double v = a[k + half];
        a[k] = u + v;
        a[k + half] = u - v;
      }
    }
  }
}

}  // namespace

FourierCoefficients WalshTransform(const TableFunction& f) {
  std::vector<double> a(f.values().begin(), f.values().end());
  Butterfly(a);
  const double scale = std::ldexp(1.0, -f.dimension());
  for (double& v : a) v *= scale;
  return FourierCoefficients(f.dimension(), std::move(a));
}

TableFunction InverseWalshTransform(const FourierCoefficients& c) {
  std::vector<double> a(c.coefficients().begin(), c.coefficients().end());
  Butterfly(a);
  return TableFunction(c.dimension(), std::move(a));
}

double InnerProduct(const TableFunction& f, const TableFunction& g) {
  if (f.dimension() != g.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "inner product of different dimensions");
  }
  double s = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) s += f[m] * g[m];
  return std::ldexp(s, -f.dimension());
}

uint32_t SupportMask(const TableFunction& f, double tol) {
  const FourierCoefficients c = WalshTransform(f);
  uint32_t mask = 0;
  for (uint32_t t = 0; t < c.coefficients().size(); ++t) {
    if (std::abs(c[t]) > tol) mask |= t;
  }
  return mask;
}

std::vector<int> SupportSet(const TableFunction& f, double tol) {
  const uint32_t mask = SupportMask(f, tol);
  std::vector<int> out;
  for (int i = 0; i < f.dimension(); ++i) {
    if (mask >> i & 1u) out.push_back(i + 1);
  }
  return out;
}

int FourierDegree(const TableFunction& f) {
  const FourierCoefficients c = WalshTransform(f);
  double largest = 0.0;
  for (double v : c.coefficients()) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) return 0;
  int degree = 0;
  for (uint32_t t = 0; t < c.coefficients().size(); ++t) {
    if (std::abs(c[t]) > kRankTolerance * largest) {
      degree = std::max(degree, std::popcount(t));
    }
  }
  return degree;
}

Basis::Basis(std::vector<TableFunction> elements, std::string label)
    : elements_(std::move(elements)), label_(std::move(label)) {
  if (elements_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty basis");
  n_ = elements_.front().dimension();
  const std::size_t rows = std::size_t{1} << n_;
  if (elements_.size() > rows) {
    throw Error(ErrorCode::kNotIndependent, "more than 2^N functions");
  }
  evaluation_.resize(static_cast<Eigen::Index>(rows), size());
  degrees_.reserve(elements_.size());
  for (int k = 0; k < size(); ++k) {
    if (elements_[k].dimension() != n_) {
      throw Error(ErrorCode::kDimensionMismatch, "basis elements differ in dimension");
    }
    for (std::size_t m = 0; m < rows; ++m) evaluation_(m, k) = elements_[k][m];
    degrees_.push_back(FourierDegree(elements_[k]));
    max_degree_ = std::max(max_degree_, degrees_.back());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(evaluation_);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() != size()) {
    throw Error(ErrorCode::kNotIndependent,
                label_ + " basis has rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(size()));
  }
}

TableFunction Basis::Combine(const CoefficientVector& c) const {
  if (c.size() != size()) throw Error(ErrorCode::kDimensionMismatch, "coefficient length");
  const Eigen::VectorXd v = evaluation_ * c;
  return TableFunction(n_, std::vector<double>(v.data(), v.data() + v.size()));
}

Basis FourierBasis(int n) {
  CheckDimension(n);
  std::vector<TableFunction> elements;
  elements.reserve(std::size_t{1} << n);
  for (uint32_t t = 0; t < (uint32_t{1} << n); ++t) {
    elements.push_back(TableFunction::Parity(n, t));
  }
  return Basis(std::move(elements), "fourier");
}

Basis ProjectedBasis(const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.rows());
  const int r = static_cast<int>(v.cols());
  CheckDimension(n);
  if (r < 1 || r > n) throw Error(ErrorCode::kInvalidArgument, "projection rank must be in [1, N]");
  const double defect =
      (v.transpose() * v - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw Error(ErrorCode::kNotOrthonormal,
                "V^T V deviates from I_r by " + std::to_string(defect));
  }
  // proj[k][m] = <v_k, x(m)>
  std::vector<TableFunction> proj;
  for (int k = 0; k < r; ++k) {
    proj.push_back(TableFunction::FromPoints(n, [&](const HypercubePoint& x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += v(i, k) * x[i];
      return s;
    }));
  }
  std::vector<TableFunction> elements;
  for (uint32_t t = 0; t < (uint32_t{1} << r); ++t) {
    TableFunction e = TableFunction::Constant(n, 1.0);
    for (int k = 0; k < r; ++k) {
      if (t >> k & 1u) e = e * proj[k];
    }
    elements.push_back(std::move(e));
  }
  return Basis(std::move(elements), "projected");
}

TableFunction PlaaBasisFunction(int n, int i, int j) {
  if (i < 1 || i > j || j > n) {
    throw Error(ErrorCode::kInvalidArgument, "PLAA basis index requires 1 <= i <= j <= N");
  }
  return TableFunction::FromPoints(n, [&](const HypercubePoint& x) {
    double tail = 1.0;
    for (int k = j + 1; k <= n; ++k) tail *= (1.0 + x[k - 1]) / 2.0;
    const double head = (1.0 - x[j - 1]) / 2.0;
    return (i == j ? -1.0 : static_cast<double>(x[i - 1])) * head * tail;
  });
}

Basis PlaaBasis(int n) {
  CheckDimension(n);
  std::vector<TableFunction> elements;
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= j; ++i) elements.push_back(PlaaBasisFunction(n, i, j));
  }
  return Basis(std::move(elements), "plaa");
}

Basis GrpeInducedBasis(std::span<const Eigen::MatrixXd> u_set) {
  if (u_set.empty()) throw Error(ErrorCode::kInvalidArgument, "empty GRPE matrix set");
  const int n = static_cast<int>(u_set.front().rows());
  CheckDimension(n);
  std::vector<TableFunction> plaa;
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i <= j; ++i) plaa.push_back(PlaaBasisFunction(n, i, j));
  }
  std::vector<TableFunction> elements;
  for (const Eigen::MatrixXd& u : u_set) {
    if (u.rows() != n || u.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "GRPE matrices must be N x N");
    }
    TableFunction e = TableFunction::Zero(n);
    int idx = 0;
    for (int j = 1; j <= n; ++j) {
      for (int i = 1; i <= j; ++i, ++idx) {
        if (u(i - 1, j - 1) != 0.0) e += u(i - 1, j - 1) * plaa[idx];
      }
    }
    elements.push_back(std::move(e));
  }
  return Basis(std::move(elements), "grpe");
}

CoefficientVector ExpandInBasis(const TableFunction& f, const Basis& basis, double tol) {
  if (f.dimension() != basis.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "function and basis dimensions differ");
  }
  const Eigen::Map<const Eigen::VectorXd> target(f.values().data(),
                                                 static_cast<Eigen::Index>(f.size()));
  const Eigen::MatrixXd& a = basis.evaluation_matrix();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(kRankTolerance);
  CoefficientVector c = qr.solve(target);
  const double residual = (a * c - target).cwiseAbs().maxCoeff();
  if (residual > tol) {
    throw Error(ErrorCode::kNotInSpan,
                "function lies outside span(" + basis.label() + "), residual " +
                    std::to_string(residual));
  }
  return c;
}

DegreeProfile::DegreeProfile(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty degree profile");
  for (double m : masses_) {
    if (!(m >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative degree mass");
  }
}

double DegreeProfile::MassAtDegree(int d) const {
  if (d < 0 || d > max_degree()) return 0.0;
  return masses_[max_degree() - d];
}

DegreeProfile ComputeDegreeProfile(const CoefficientVector& c, const Basis& basis) {
  if (c.size() != basis.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient vector does not match basis");
  }
  const int top = basis.max_degree();
  std::vector<double> masses(top + 1, 0.0);
  for (int k = 0; k < basis.size(); ++k) {
    masses[top - basis.degrees()[k]] += c[k] * c[k];
  }
  return DegreeProfile(std::move(masses));
}

std::weak_ordering CompareProfiles(const DegreeProfile& p, const DegreeProfile& q,
                                   double tol) {
  const int top = std::max(p.max_degree(), q.max_degree());
  for (int d = top; d >= 0; --d) {
    const double a = p.MassAtDegree(d);
    const double b = q.MassAtDegree(d);
    if (std::abs(a - b) <= tol) continue;
    return a < b ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  return std::weak_ordering::equivalent;
}

}  // namespace ldhd::boolean
