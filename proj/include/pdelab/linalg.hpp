#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdelab {

/// Real vector with at least one entry.
class DenseVector {
 public:
  explicit DenseVector(std::size_t n, double fill = 0.0);
  explicit DenseVector(std::vector<double> entries);
  DenseVector(std::initializer_list<double> entries);

  std::size_t size() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> data_;
};

/// Row-major real matrix, rows >= 1 and cols >= 1.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  /// Nested rows; every row must have the same length.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Tridiagonal system A u = rhs with sub/sup of length n-1.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> sup;
  std::vector<double> rhs;

  std::size_t size() const noexcept { return diag.size(); }
  /// Throws ShapeError unless all lengths agree with a single n >= 1.
  void validate() const;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseVector matvec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix transpose(const DenseMatrix& a);

/// Max-abs entry of a - b; operands must have equal shape.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Moore-Penrose pseudoinverse of a skinny full-column-rank matrix, computed
/// literally as (X^T X)^-1 X^T with an LDL^T factorization of X^T X.
/// A pivot below 1e-12 * max diag(X^T X) raises SingularMatrixError.
DenseMatrix pseudoinverse(const DenseMatrix& x);

/// Thomas algorithm, no pivoting. Assumes diagonal dominance; a zero (or
/// non-finite) pivot raises SingularSystemError.
DenseVector solve_tridiagonal(const TridiagonalSystem& sys);

/// A u for a tridiagonal A, used for residual checks.
std::vector<double> tridiagonal_apply(const TridiagonalSystem& sys, std::span<const double> u);

}  // namespace pdelab
