#include "pdelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdelab/errors.hpp"

namespace pdelab {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

DenseVector::DenseVector(std::size_t n, double fill) : data_(n, fill) {
  if (n == 0) throw ShapeError("DenseVector: length must be >= 1");
}

DenseVector::DenseVector(std::vector<double> entries) : data_(std::move(entries)) {
  if (data_.empty()) throw ShapeError("DenseVector: length must be >= 1");
}

DenseVector::DenseVector(std::initializer_list<double> entries) : DenseVector(std::vector<double>(entries)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw ShapeError("DenseMatrix: empty shape " + shape(rows, cols));
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows == 0 || cols == 0) throw ShapeError("DenseMatrix: empty shape " + shape(rows, cols));
  if (data_.size() != rows * cols)
    throw ShapeError("DenseMatrix: " + std::to_string(data_.size()) + " entries for shape " + shape(rows, cols));
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw ShapeError("DenseMatrix: empty shape");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("DenseMatrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void TridiagonalSystem::validate() const {
  const std::size_t n = diag.size();
  if (n == 0) throw ShapeError("TridiagonalSystem: empty diagonal");
  if (sub.size() != n - 1 || sup.size() != n - 1 || rhs.size() != n)
    throw ShapeError("TridiagonalSystem: inconsistent lengths for n=" + std::to_string(n));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + shape(a.rows(), a.cols()) + " * " + shape(b.rows(), b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseVector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size())
    throw ShapeError("matvec: " + shape(a.rows(), a.cols()) + " * vector of " + std::to_string(x.size()));
  DenseVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("max_abs_diff: " + shape(a.rows(), a.cols()) + " vs " + shape(b.rows(), b.cols()));
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

DenseMatrix pseudoinverse(const DenseMatrix& x) {
  const std::size_t n = x.cols();
  if (x.rows() < n) throw ShapeError("pseudoinverse: expected rows >= cols, got " + shape(x.rows(), n));

  // G = X^T X, factored in place as L D L^T (unit lower L below the diagonal).
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * x(r, j);
      g(i, j) = s;
      g(j, i) = s;
    }

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(g(i, i)));
  const double threshold = 1e-12 * max_diag;

  std::vector<double> d(n);
  DenseMatrix l = DenseMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    double dj = g(j, j);
    for (std::size_t k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[k];
    if (!(std::abs(dj) >= threshold) || dj <= 0.0 || max_diag == 0.0)
      throw SingularMatrixError("pseudoinverse: X^T X is rank deficient (pivot " + std::to_string(j) + ")");
    d[j] = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k) * d[k];
      l(i, j) = s / dj;
    }
  }

  // Solve (L D L^T) P = X^T column by column of X^T (i.e. row by row of X).
  DenseMatrix pinv(n, x.rows());
  std::vector<double> z(n);
  for (std::size_t c = 0; c < x.rows(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(c, i);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
      z[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] /= d[i];
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * z[k];
      z[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) pinv(i, c) = z[i];
  }
  return pinv;
}

DenseVector solve_tridiagonal(const TridiagonalSystem& sys) {
  sys.validate();
  const std::size_t n = sys.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> u(n);

  double pivot = sys.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw SingularSystemError("solve_tridiagonal: zero pivot at row 0");
  if (n > 1) c[0] = sys.sup[0] / pivot;
  u[0] = sys.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw SingularSystemError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    if (i + 1 < n) c[i] = sys.sup[i] / pivot;
    u[i] = (sys.rhs[i] - sys.sub[i - 1] * u[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) u[i] -= c[i] * u[i + 1];
  return DenseVector(std::move(u));
}

std::vector<double> tridiagonal_apply(const TridiagonalSystem& sys, std::span<const double> u) {
  sys.validate();
  const std::size_t n = sys.size();
  if (u.size() != n) throw ShapeError("tridiagonal_apply: vector length mismatch");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = sys.diag[i] * u[i];
    if (i > 0) s += sys.sub[i - 1] * u[i - 1];
    if (i + 1 < n) s += sys.sup[i] * u[i + 1];
    r[i] = s;
  }
  return r;
}

}  // namespace pdelab
