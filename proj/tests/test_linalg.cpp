#include <cmath>
#include <stdexcept>
#include <vector>

#include "cif/linalg.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace cif;
using testutil::Dense;

namespace {

TridiagonalMatrix random_tridiagonal(int n, testutil::Rng& rng, double diag_boost = 4.0) {
  TridiagonalMatrix t = TridiagonalMatrix::zero(n);
  for (int i = 0; i < n; ++i) t.diag[i] = diag_boost + rng.uniform(-1.0, 1.0);
  for (int i = 0; i + 1 < n; ++i) {
    t.sub[i] = rng.uniform(-1.0, 1.0);
    t.super[i] = rng.uniform(-1.0, 1.0);
  }
  return t;
}

BandedMatrix random_banded(int n, int kl, int ku, testutil::Rng& rng, double diag_boost) {
  BandedMatrix b(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j)
      b.at(i, j) = rng.uniform(-1.0, 1.0) + (i == j ? diag_boost : 0.0);
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("tridiagonal apply, add_scaled and scaled against dense arithmetic") {
  testutil::Rng rng(11);
  TridiagonalMatrix t = random_tridiagonal(9, rng);
  const TridiagonalMatrix u = random_tridiagonal(9, rng);
  const auto x = rng.vec(9, -2.0, 2.0);

  CHECK(testutil::max_abs_diff(t.apply(x), testutil::dense_apply(testutil::dense_of(t), x)) <
        1e-14);

  const TridiagonalMatrix s = t.scaled(-2.5);
  Dense expect = testutil::dense_of(t);
  for (auto& row : expect)
    for (auto& v : row) v *= -2.5;
  CHECK(testutil::max_abs_diff(testutil::dense_of(s), expect) < 1e-14);

  TridiagonalMatrix sum = t;
  sum.add_scaled(0.75, u);
  Dense dsum = testutil::dense_of(t);
  const Dense du = testutil::dense_of(u);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) dsum[i][j] += 0.75 * du[i][j];
  CHECK(testutil::max_abs_diff(testutil::dense_of(sum), dsum) < 1e-14);
}

TEST_CASE("bilinear form equals x^T A y") {
  testutil::Rng rng(12);
  const TridiagonalMatrix t = random_tridiagonal(7, rng);
  const auto x = rng.vec(7, -1.0, 1.0);
  const auto y = rng.vec(7, -1.0, 1.0);

  double expect = 0.0;
  const auto ay = t.apply(y);
  for (int i = 0; i < 7; ++i) expect += x[i] * ay[i];
  CHECK(bilinear(t, x, y) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("sparse matrix accumulates and applies") {
  SparseMatrix s = SparseMatrix::zero(3, 4);
  CHECK(s.nnz() == 0);
  CHECK(s.at(1, 2) == 0.0);

  s.add(1, 2, 0.5);
  s.add(1, 2, 0.25);  // accumulates into the same slot
  s.add(0, 3, -1.0);
  s.add(2, 0, 2.0);
  CHECK(s.nnz() == 3);
  CHECK(s.at(1, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s.at(0, 0) == 0.0);

  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto y = s.apply(x);
  REQUIRE(y.size() == 3);
  CHECK(y[0] == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(y[2] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("banded storage round-trips and masks out-of-band entries") {
  BandedMatrix b(5, 2, 1);
  b.at(0, 0) = 1.0;
  b.at(2, 0) = 3.0;   // subdiagonal 2
  b.at(3, 4) = -2.0;  // superdiagonal 1
  CHECK(b.get(0, 0) == 1.0);
  CHECK(b.get(2, 0) == 3.0);
  CHECK(b.get(3, 4) == -2.0);
  CHECK(b.get(0, 4) == 0.0);  // outside the band
  CHECK(b.get(4, 0) == 0.0);

  CHECK_THROWS_AS(b.at(4, 0) = 1.0, std::out_of_range);  // below kl
  CHECK(b.kl() == 2);
  CHECK(b.ku() == 1);
}

TEST_CASE("banded from_tridiagonal preserves the matrix") {
  testutil::Rng rng(13);
  const TridiagonalMatrix t = random_tridiagonal(6, rng);
  const BandedMatrix b = BandedMatrix::from_tridiagonal(t);
  CHECK(testutil::max_abs_diff(testutil::dense_of(b), testutil::dense_of(t)) == 0.0);

  BandedMatrix wide = BandedMatrix::from_tridiagonal(t, 2, 2);
  wide.add_tridiagonal(-0.5, t);
  Dense expect = testutil::dense_of(t);
  for (auto& row : expect)
    for (auto& v : row) v *= 0.5;
  CHECK(testutil::max_abs_diff(testutil::dense_of(wide), expect) < 1e-15);
}

TEST_CASE("banded apply matches dense multiplication") {
  testutil::Rng rng(14);
  const BandedMatrix b = random_banded(12, 2, 3, rng, 0.0);
  const auto x = rng.vec(12, -1.0, 1.0);
  CHECK(testutil::max_abs_diff(b.apply(x), testutil::dense_apply(testutil::dense_of(b), x)) <
        1e-14);
}

TEST_CASE("banded LU solves random diagonally dominant systems") {
  testutil::Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(3, 30);
    const int kl = rng.integer(1, 3);
    const int ku = rng.integer(1, 3);
    const BandedMatrix b = random_banded(n, kl, ku, rng, 8.0);
    const auto x_true = rng.vec(static_cast<std::size_t>(n), -2.0, 2.0);
    const auto rhs = b.apply(x_true);

    const BandedLU lu(b);
    const auto x = lu.solve(rhs);
    CHECK(testutil::max_abs_diff(x, x_true) < 1e-11);
  }
}

TEST_CASE("banded LU pivots through a zero leading entry") {
  BandedMatrix b(2, 1, 1);
  b.at(0, 0) = 0.0;
  b.at(0, 1) = 1.0;
  b.at(1, 0) = 1.0;
  b.at(1, 1) = 0.0;
  const BandedLU lu(b);
  const auto x = lu.solve({3.0, 7.0});
  CHECK(x[0] == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("banded LU rejects singular matrices") {
  BandedMatrix b(2, 1, 1);
  b.at(0, 0) = 1.0;
  b.at(0, 1) = 1.0;
  b.at(1, 0) = 1.0;
  b.at(1, 1) = 1.0;
  CHECK_THROWS_AS(BandedLU{b}, std::runtime_error);
}

TEST_CASE("pivoted banded LU handles a matrix plain elimination would break") {
  // Leading block [[eps, 1], [1, 1]] forces a row swap for stability; compare
  // against the dense solver.
  const int n = 8;
  testutil::Rng rng(16);
  BandedMatrix b = random_banded(n, 2, 2, rng, 0.0);
  b.at(0, 0) = 1e-14;
  b.at(0, 1) = 1.0;
  b.at(1, 0) = 1.0;

  std::vector<double> dense_a(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dense_a[i * n + j] = b.get(i, j);
  const auto rhs = rng.vec(n, -1.0, 1.0);

  const auto x_banded = BandedLU(b).solve(rhs);
  const auto x_dense = dense_solve(dense_a, rhs, n);
  CHECK(testutil::max_abs_diff(x_banded, x_dense) < 1e-10);
}

TEST_CASE("tridiagonal solve matches dense elimination") {
  testutil::Rng rng(17);
  const TridiagonalMatrix t = random_tridiagonal(25, rng);
  const auto x_true = rng.vec(25, -3.0, 3.0);
  const auto x = solve_tridiagonal(t, t.apply(x_true));
  CHECK(testutil::max_abs_diff(x, x_true) < 1e-11);
}

TEST_CASE("dense solve on a hand-checked system") {
  // [[2,1,0],[1,3,1],[0,1,2]] * [1,1,1]^T = [3,5,3]^T
  const std::vector<double> a = {2, 1, 0, 1, 3, 1, 0, 1, 2};
  const auto x = dense_solve(a, {3.0, 5.0, 3.0}, 3);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(dense_solve({1, 1, 1, 1}, {1.0, 1.0}, 2), std::runtime_error);
}

TEST_CASE("low-rank corrected solver implements (B + s G^T G)^{-1}") {
  testutil::Rng rng(18);
  const int n = 20;
  const BandedMatrix b = random_banded(n, 1, 1, rng, 6.0);

  std::vector<std::vector<double>> g_rows;
  for (int m = 0; m < 3; ++m) g_rows.push_back(rng.vec(n, -1.0, 1.0));
  const double s = 0.7;

  const LowRankCorrectedSolver solver(b, g_rows, s);
  const auto rhs = rng.vec(n, -1.0, 1.0);
  const auto x = solver.solve(rhs);

  // Verify (B + s G^T G) x == rhs.
  auto residual = b.apply(x);
  for (const auto& g : g_rows) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += g[i] * x[i];
    for (int i = 0; i < n; ++i) residual[i] += s * dot * g[i];
  }
  CHECK(testutil::max_abs_diff(residual, rhs) < 1e-11);
}

TEST_CASE("low-rank corrected solver degenerates gracefully") {
  testutil::Rng rng(19);
  const int n = 10;
  const BandedMatrix b = random_banded(n, 1, 1, rng, 6.0);
  const auto rhs = rng.vec(n, -1.0, 1.0);
  const auto plain = BandedLU(b).solve(rhs);

  SUBCASE("zero scale ignores the correction") {
    const LowRankCorrectedSolver solver(b, {rng.vec(n, -1.0, 1.0)}, 0.0);
    CHECK(testutil::max_abs_diff(solver.solve(rhs), plain) < 1e-12);
  }
  SUBCASE("empty row list is a plain banded solve") {
    const LowRankCorrectedSolver solver(b, {}, 0.7);
    CHECK(testutil::max_abs_diff(solver.solve(rhs), plain) < 1e-12);
  }
}

TEST_SUITE_END();
