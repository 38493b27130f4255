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

// Real-valued functions on the hypercube {+1,-1}^N stored as dense tables,
// their Fourier (Walsh) expansion, linearly independent bases and degree
// profiles with respect to such bases.
//
// Storage convention: table index bit i is set iff x_{i+1} = -1. The all-ones
// point is index 0 and the subcube X_{N0} = {+-1}^{N0} x {1}^{N-N0} is the
// contiguous prefix [0, 2^{N0}). Subsets T of [N] are encoded the same way
// (bit i set iff i+1 in T), so chi_T(x) = (-1)^{popcount(T & x)}.

#ifndef LDHD_BOOLEAN_CORE_H_
#define LDHD_BOOLEAN_CORE_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldhd/error.h"

namespace ldhd::boolean {

inline constexpr int kMaxDimension = 20;
// Relative tolerance for rank, span and exact-degree decisions.
inline constexpr double kRankTolerance = 1e-9;

void CheckDimension(int n);

class HypercubePoint {
 public:
  // Entries must all be +1 or -1.
  explicit HypercubePoint(std::vector<int> entries);
  static HypercubePoint FromIndex(uint32_t index, int n);

  int dimension() const { return static_cast<int>(entries_.size()); }
  // Zero-based: operator[](0) is x_1.
  int operator[](int i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }
  uint32_t index() const;

  friend bool operator==(const HypercubePoint&, const HypercubePoint&) = default;

 private:
  std::vector<int> entries_;
};

class TableFunction {
 public:
  TableFunction(int n, std::vector<double> values);

  static TableFunction Zero(int n) { return Constant(n, 0.0); }
  static TableFunction Constant(int n, double c);
  // chi_T for the subset encoded by `subset`.
  static TableFunction Parity(int n, uint32_t subset);
  // x_i, one-based.
  static TableFunction Coordinate(int n, int i);

  template <typename F>
  static TableFunction FromPoints(int n, F&& f) {
    CheckDimension(n);
    std::vector<double> values(std::size_t{1} << n);
    for (uint32_t m = 0; m < values.size(); ++m) {
      values[m] = f(HypercubePoint::FromIndex(m, n));
    }
    return TableFunction(n, std::move(values));
  }

  int dimension() const { return n_; }
  std::size_t size() const { return values_.size(); }
  double operator[](uint32_t index) const { return values_[index]; }
  double operator()(const HypercubePoint& x) const;
  std::span<const double> values() const { return values_; }

  TableFunction& operator+=(const TableFunction& other);
  TableFunction& operator-=(const TableFunction& other);
  TableFunction& operator*=(double s);
  friend TableFunction operator+(TableFunction a, const TableFunction& b) { return a += b; }
  friend TableFunction operator-(TableFunction a, const TableFunction& b) { return a -= b; }
  friend TableFunction operator*(double s, TableFunction a) { return a *= s; }
  // Pointwise product.
  friend TableFunction operator*(const TableFunction& a, const TableFunction& b);

 private:
  int n_;
  std::vector<double> values_;
};

struct SubcubeSpec {
  int n = 1;
  int n0 = 0;

  void Validate() const;
  uint32_t subcube_size() const { return uint32_t{1} << n0; }
  uint32_t cube_size() const { return uint32_t{1} << n; }
  bool Contains(uint32_t index) const { return index < subcube_size(); }
};

// The 2^{N0} points of X_{N0}, in index order.
std::vector<HypercubePoint> SubcubePoints(const SubcubeSpec& spec);

class FourierCoefficients {
 public:
  FourierCoefficients(int n, std::vector<double> coefficients);

  int dimension() const { return n_; }
  double operator[](uint32_t subset) const { return coefficients_[subset]; }
  std::span<const double> coefficients() const { return coefficients_; }
  double SquaredNorm() const;

 private:
  int n_;
  std::vector<double> coefficients_;
};

// f^(T) = 2^{-N} sum_x f(x) chi_T(x), via the fast Walsh-Hadamard butterfly.
FourierCoefficients WalshTransform(const TableFunction& f);
TableFunction InverseWalshTransform(const FourierCoefficients& c);

// <f, g> = E_{x ~ U}[f(x) g(x)].
double InnerProduct(const TableFunction& f, const TableFunction& g);

// Union of all T with |f^(T)| > tol, as a bitmask and as sorted one-based
// coordinates.
uint32_t SupportMask(const TableFunction& f, double tol);
std::vector<int> SupportSet(const TableFunction& f, double tol);

// Largest |T| with a coefficient above kRankTolerance relative to the largest
// coefficient. The zero function has degree 0.
int FourierDegree(const TableFunction& f);

using CoefficientVector = Eigen::VectorXd;

// Ordered linearly independent set of functions with cached exact degrees.
class Basis {
 public:
  // Throws NotIndependent when the 2^N x R evaluation matrix is rank
  // deficient at kRankTolerance.
  Basis(std::vector<TableFunction> elements, std::string label);

  int dimension() const { return n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<TableFunction>& elements() const { return elements_; }
  const TableFunction& element(int i) const { return elements_[i]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int max_degree() const { return max_degree_; }
  const std::string& label() const { return label_; }
  // Row m holds every element evaluated at table index m.
  const Eigen::MatrixXd& evaluation_matrix() const { return evaluation_; }

  // Linear combination sum_i c_i b_i as a table.
  TableFunction Combine(const CoefficientVector& c) const;

 private:
  int n_;
  std::vector<TableFunction> elements_;
  std::vector<int> degrees_;
  int max_degree_ = 0;
  std::string label_;
  Eigen::MatrixXd evaluation_;
};

Basis FourierBasis(int n);
// B(V) = {chi^V_T}_{T subset [r]}, chi^V_T(x) = prod_{t in T} <v_t, x>.
// Throws NotOrthonormal unless ||V^T V - I_r||_max <= 1e-10.
Basis ProjectedBasis(const Eigen::MatrixXd& v);
// b^PLAA_ij for 1 <= i <= j <= N, one-based.
TableFunction PlaaBasisFunction(int n, int i, int j);
// Ordered column by column: (1,1), (1,2), (2,2), (1,3), ...
Basis PlaaBasis(int n);
// {sum_{i<=j} (U_k)_ij b^PLAA_ij}_k for upper-triangular U_k.
Basis GrpeInducedBasis(std::span<const Eigen::MatrixXd> u_set);

// Least-squares coefficients of f in B; throws NotInSpan when the max
// absolute residual exceeds tol.
CoefficientVector ExpandInBasis(const TableFunction& f, const Basis& basis,
                                double tol = kRankTolerance);

// masses[i] holds the squared coefficient mass at degree D - i, so index 0 is
// the highest degree.
class DegreeProfile {
 public:
  explicit DegreeProfile(std::vector<double> masses);

  const std::vector<double>& masses() const { return masses_; }
  int max_degree() const { return static_cast<int>(masses_.size()) - 1; }
  double MassAtDegree(int d) const;

 private:
  std::vector<double> masses_;
};

DegreeProfile ComputeDegreeProfile(const CoefficientVector& c, const Basis& basis);

// Lexicographic from the highest degree; the shorter profile is padded with
// leading zeros. Entries closer than tol compare equal.
std::weak_ordering CompareProfiles(const DegreeProfile& p, const DegreeProfile& q,
                                   double tol = 0.0);

}  // namespace ldhd::boolean

#endif  // LDHD_BOOLEAN_CORE_H_
