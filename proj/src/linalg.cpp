#include "netspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netspec/errors.hpp"

namespace netspec {

namespace {

void require_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DimensionError("matrix entry is not finite");
  }
}

// Row-pivoted LU of a square matrix; rows of `lu` are stored permuted.
struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  std::size_t rank = 0;
};

LuFactors lu_factor(const DenseMatrix& a, double tol) {
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n), 0};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  const double thresh = tol * a.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(p, k))) p = i;
    }
    if (p != k) {
      f.lu.swap_rows(p, k);
      std::swap(f.perm[p], f.perm[k]);
    }
    const double pivot = f.lu(k, k);
    if (std::abs(pivot) <= thresh || pivot == 0.0) continue;
    ++f.rank;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) / pivot;
      f.lu(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  return f;
}

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b) {
  const std::size_t n = f.lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  if (data_.size() != rows * cols) {
    throw DimensionError("expected " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(data_.size()));
  }
  require_finite(data_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double DenseMatrix::norm_inf() const {
  double m = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (double x : row(r)) s += std::abs(x);
    m = std::max(m, s);
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

void DenseMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap_ranges(data_.begin() + a * cols_, data_.begin() + (a + 1) * cols_,
                   data_.begin() + b * cols_);
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector dimension mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

CharPoly charpoly_oracle(const DenseMatrix& w) {
  if (!w.square()) throw DimensionError("characteristic polynomial needs a square matrix");
  const std::size_t n = w.rows();
  CharPoly p{std::vector<double>(n)};
  // M_k = W M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(W M_k) / k,  M_0 = 0, c_n = 1.
  DenseMatrix m(n, n);
  double c_prev = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    DenseMatrix mk = w * m;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += c_prev;
    const DenseMatrix wm = w * mk;
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += wm(i, i);
    const double c = -trace / static_cast<double>(k);
    p.coeffs[n - k] = c;
    m = std::move(mk);
    c_prev = c;
  }
  return p;
}

DenseMatrix krylov_matrix(const DenseMatrix& w, std::span<const double> y0) {
  if (!w.square()) throw DimensionError("Krylov matrix needs a square W");
  if (y0.size() != w.rows()) throw DimensionError("y0 length does not match W");
  const std::size_t n = w.rows();
  DenseMatrix k(n, n);
  std::vector<double> col(y0.begin(), y0.end());
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) k(i, l) = col[i];
    if (l + 1 < n) col = w * std::span<const double>(col);
  }
  return k;
}

std::size_t rank(const DenseMatrix& m, double tol) {
  const double thresh = tol * m.max_abs();
  if (m.max_abs() == 0.0) return 0;
  DenseMatrix r = m;
  std::size_t row = 0;
  for (std::size_t col = 0; col < r.cols() && row < r.rows(); ++col) {
    std::size_t p = row;
    for (std::size_t i = row + 1; i < r.rows(); ++i) {
      if (std::abs(r(i, col)) > std::abs(r(p, col))) p = i;
    }
    if (std::abs(r(p, col)) <= thresh) continue;
    r.swap_rows(p, row);
    for (std::size_t i = row + 1; i < r.rows(); ++i) {
      const double f = r(i, col) / r(row, col);
      for (std::size_t j = col; j < r.cols(); ++j) r(i, j) -= f * r(row, j);
    }
    ++row;
  }
  return row;
}

std::vector<double> solve_dense(const DenseMatrix& a, std::span<const double> b, double tol) {
  if (!a.square()) throw DimensionError("solve_dense needs a square matrix");
  if (b.size() != a.rows()) throw DimensionError("right-hand side length mismatch");
  const LuFactors f = lu_factor(a, tol);
  if (f.rank < a.rows()) {
    throw SingularMatrixError("matrix is singular (numerical rank " + std::to_string(f.rank) +
                                  " of " + std::to_string(a.rows()) + ")",
                              f.rank);
  }
  std::vector<double> x = lu_solve(f, b);
  std::vector<double> r = a * std::span<const double>(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const std::vector<double> dx = lu_solve(f, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

double condition_estimate(const DenseMatrix& a) {
  if (!a.square()) throw DimensionError("condition estimate needs a square matrix");
  const std::size_t n = a.rows();
  const LuFactors f = lu_factor(a, kDefaultRankTolerance);
  if (f.rank < n) return std::numeric_limits<double>::infinity();
  const LuFactors ft = lu_factor(a.transposed(), kDefaultRankTolerance);
  if (ft.rank < n) return std::numeric_limits<double>::infinity();
  const DenseMatrix at = a.transposed();

  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = 1.0 + 0.1 * static_cast<double>(i);
  normalize(start);

  constexpr int kMaxIter = 200;
  std::vector<double> v = start;
  double sigma_max = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const std::vector<double> av = a * std::span<const double>(v);
    const double est = norm2(av);
    v = at * std::span<const double>(av);
    if (norm2(v) == 0.0) break;
    normalize(v);
    const bool done = std::abs(est - sigma_max) <= 1e-10 * est;
    sigma_max = est;
    if (done) break;
  }

  v = start;
  double sigma_min = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIter; ++it) {
    const double est = norm2(a * std::span<const double>(v));
    // (A^T A)^{-1} v = A^{-1} (A^{-T} v)
    v = lu_solve(f, lu_solve(ft, v));
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      return std::numeric_limits<double>::infinity();
    }
    normalize(v);
    const bool done = std::abs(est - sigma_min) <= 1e-10 * est;
    sigma_min = est;
    if (done) break;
  }
  sigma_min = std::min(sigma_min, norm2(a * std::span<const double>(v)));
  if (sigma_min == 0.0) return std::numeric_limits<double>::infinity();
  return sigma_max / sigma_min;
}

}  // namespace netspec
