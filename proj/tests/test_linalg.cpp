#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "pdelab/errors.hpp"
#include "pdelab/linalg.hpp"
#include "pdelab/random.hpp"

using namespace pdelab;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  DenseMatrix m(r, c);
  for (auto& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

// Gauss-Jordan with partial pivoting; independent of the normal-equation path.
DenseMatrix inverse_oracle(DenseMatrix a) {
  const std::size_t n = a.rows();
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(col, c), a(piv, c));
      std::swap(inv(col, c), inv(piv, c));
    }
    const double d = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace

TEST_CASE("matmul") {
  const DenseMatrix a{{1, 2}, {3, 4}};
  CHECK(matmul(DenseMatrix::identity(2), a) == a);
  CHECK(matmul(a, DenseMatrix{{1}, {1}}) == DenseMatrix{{3}, {7}});
  CHECK(matmul(DenseMatrix(2, 2), a) == DenseMatrix(2, 2));
  CHECK_THROWS_AS(matmul(a, DenseMatrix(3, 1)), ShapeError);
}

TEST_CASE("dense types reject empty shapes") {
  CHECK_THROWS_AS(DenseMatrix(0, 3), ShapeError);
  CHECK_THROWS_AS(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(DenseVector(std::vector<double>{}), ShapeError);
}

TEST_CASE("pseudoinverse examples") {
  CHECK(max_abs_diff(pseudoinverse(DenseMatrix::identity(2)), DenseMatrix::identity(2)) == 0.0);

  const DenseMatrix p = pseudoinverse(DenseMatrix{{1}, {1}});
  CHECK(p.rows() == 1);
  CHECK(p.cols() == 2);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const std::size_t n = 37;
  const DenseMatrix q = pseudoinverse(DenseMatrix(n, 1, 1.0));
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(q(0, i) - 1.0 / n) < 1e-15);
}

TEST_CASE("pseudoinverse rejects rank deficiency") {
  CHECK_THROWS_AS(pseudoinverse(DenseMatrix{{3, 1}, {3, 1}, {3, 1}}), SingularMatrixError);
  CHECK_THROWS_AS(pseudoinverse(DenseMatrix(4, 2)), SingularMatrixError);
  // Columns nearly parallel: relative pivot ~1e-20 is below 1e-12.
  CHECK_THROWS_AS(pseudoinverse(DenseMatrix{{1, 1}, {1, 1 + 1e-10}}), SingularMatrixError);
  CHECK_THROWS_AS(pseudoinverse(DenseMatrix(1, 2, 1.0)), ShapeError);
}

TEST_CASE("property: pseudoinverse is a left inverse of skinny full-rank matrices") {
  Rng rng(0xC0FFEE);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng.below(20);
    const std::size_t cols = 1 + rng.below(rows);
    const DenseMatrix x = random_matrix(rng, rows, cols);
    const DenseMatrix err = matmul(pseudoinverse(x), x);
    CHECK(max_abs_diff(err, DenseMatrix::identity(cols)) < 1e-8);
  }
}

TEST_CASE("property: square pseudoinverse equals the inverse") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    DenseMatrix x = random_matrix(rng, n, n);
    // Strict diagonal dominance keeps cond(X)^2, which the normal equations
    // square into the error, well inside the 1e-10 budget.
    for (std::size_t i = 0; i < n; ++i) x(i, i) += static_cast<double>(n);
    CHECK(max_abs_diff(pseudoinverse(x), inverse_oracle(x)) < 1e-10);
  }
}

TEST_CASE("solve_tridiagonal examples") {
  const TridiagonalSystem ident{{0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0}, {4, -1, 2.5, 7}};
  CHECK(solve_tridiagonal(ident) == DenseVector{4, -1, 2.5, 7});

  const DenseVector u = solve_tridiagonal({{1}, {2, 2}, {1}, {3, 3}});
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u[1] == doctest::Approx(1.0).epsilon(1e-15));

  // -u'' = 0 with u(0)=0, u(1)=1 on 6 interior nodes: u_i = i/7.
  const std::size_t m = 6;
  TridiagonalSystem lap{std::vector<double>(m - 1, -1), std::vector<double>(m, 2), std::vector<double>(m - 1, -1),
                        std::vector<double>(m, 0)};
  lap.rhs.back() = 1.0;
  const DenseVector lin = solve_tridiagonal(lap);
  for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(lin[i] - static_cast<double>(i + 1) / 7.0) < 1e-14);
}

TEST_CASE("solve_tridiagonal errors") {
  CHECK_THROWS_AS(solve_tridiagonal({{1}, {0, 1}, {1}, {1, 1}}), SingularSystemError);
  // Second pivot 1 - 1*1 = 0.
  CHECK_THROWS_AS(solve_tridiagonal({{1}, {1, 1}, {1}, {1, 1}}), SingularSystemError);
  CHECK_THROWS_AS(solve_tridiagonal({{1, 1}, {1, 1}, {1}, {1, 1}}), ShapeError);
}

TEST_CASE("property: tridiagonal residual on diagonally dominant systems") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(1000);
    TridiagonalSystem sys{std::vector<double>(n - 1), std::vector<double>(n), std::vector<double>(n - 1),
                          std::vector<double>(n)};
    for (auto& v : sys.sub) v = rng.uniform(-1, 1);
    for (auto& v : sys.sup) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double off = (i > 0 ? std::abs(sys.sub[i - 1]) : 0.0) + (i + 1 < n ? std::abs(sys.sup[i]) : 0.0);
      sys.diag[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (off + rng.uniform(0.1, 2.0));
      sys.rhs[i] = rng.uniform(-10, 10);
    }
    const DenseVector u = solve_tridiagonal(sys);
    const auto au = tridiagonal_apply(sys, u.span());
    double res = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res = std::max(res, std::abs(au[i] - sys.rhs[i]));
      scale = std::max(scale, std::abs(sys.rhs[i]));
    }
    CHECK(res / scale < 1e-12);
  }
}
