#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace netspec {

/// Dense real matrix, row-major. Entries are finite on construction.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& entries() const { return data_; }

  double max_abs() const;
  /// Induced infinity norm (largest absolute row sum).
  double norm_inf() const;

  DenseMatrix transposed() const;
  void swap_rows(std::size_t a, std::size_t b);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x);

double norm_inf(std::span<const double> v);

/// Monic characteristic polynomial det(lambda I - W) with the leading 1
/// implied: coeffs[k] multiplies lambda^k, k = 0 .. N-1.
struct CharPoly {
  std::vector<double> coeffs;

  std::size_t degree() const { return coeffs.size(); }
};

inline constexpr double kDefaultRankTolerance = 1e-9;

/// Faddeev-LeVerrier recursion.
CharPoly charpoly_oracle(const DenseMatrix& w);

/// [y0 | W y0 | ... | W^{N-1} y0]; column l+1 is computed as W * column l.
DenseMatrix krylov_matrix(const DenseMatrix& w, std::span<const double> y0);

/// Numerical rank by row reduction with partial pivoting. A pivot counts as
/// zero when |pivot| <= tol * max_abs(m).
std::size_t rank(const DenseMatrix& m, double tol = kDefaultRankTolerance);

/// LU with partial pivoting plus one step of iterative refinement. Intended
/// for reference answers only. Throws SingularMatrixError carrying the rank.
std::vector<double> solve_dense(const DenseMatrix& a, std::span<const double> b,
                                double tol = kDefaultRankTolerance);

/// Estimate of sigma_max / sigma_min from power iteration on A^T A and
/// inverse iteration through an LU factorization of A. Returns +infinity
/// when A is singular at the default rank tolerance.
double condition_estimate(const DenseMatrix& a);

}  // namespace netspec
