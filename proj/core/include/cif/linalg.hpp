#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cif {

/// Tridiagonal matrix stored as three diagonals (sub/super have size n-1).
struct TridiagonalMatrix {
  std::vector<double> sub, diag, super;

  int n() const { return static_cast<int>(diag.size()); }

  static TridiagonalMatrix zero(int n);

  std::vector<double> apply(const std::vector<double>& x) const;

  /// this += s * other; shapes must match.
  void add_scaled(double s, const TridiagonalMatrix& other);

  TridiagonalMatrix scaled(double s) const;
};

/// x^T A y for tridiagonal A.
double bilinear(const TridiagonalMatrix& A, const std::vector<double>& x,
                const std::vector<double>& y);

/// Row-indexed sparse matrix; entries within a row are kept sorted by column.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::pair<int, double>>> entries;

  static SparseMatrix zero(int rows, int cols);

  double at(int i, int j) const;       ///< 0 when the entry is absent
  void add(int i, int j, double v);    ///< accumulates into (i, j)
  std::vector<double> apply(const std::vector<double>& x) const;
  std::size_t nnz() const;
};

/// General banded n x n matrix with kl sub- and ku superdiagonals, stored
/// row-by-diagonal so that entry (i, j) with -kl <= j - i <= ku lives at
/// band(i, j - i). Extra kl rows of headroom are carried for pivoted LU fill.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  static BandedMatrix from_tridiagonal(const TridiagonalMatrix& t, int kl = 1, int ku = 1);

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  double& at(int i, int j);
  double get(int i, int j) const;  ///< 0 outside the band

  void add_tridiagonal(double s, const TridiagonalMatrix& t);
  std::vector<double> apply(const std::vector<double>& x) const;

 private:
  friend class BandedLU;
  // storage_[i * width + (j - i + kl)] holds entry (i, j); diagonal offsets
  // j - i span [-kl, kl + ku], the kl slots above ku being LU fill headroom.
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> storage_;
  int width() const { return 2 * kl_ + ku_ + 1; }
  double* row(int i) { return storage_.data() + static_cast<std::size_t>(i) * width(); }
  const double* row(int i) const {
    return storage_.data() + static_cast<std::size_t>(i) * width();
  }
};

/// LU factorization with partial pivoting of a banded matrix (row-swap form;
/// fill is confined to kl extra superdiagonals). Throws std::runtime_error on
/// exact singularity.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix a);

  std::vector<double> solve(std::vector<double> b) const;
  void solve_in_place(std::vector<double>& b) const;

 private:
  BandedMatrix a_;
  std::vector<int> pivot_;
};

/// Solves T x = b for tridiagonal T (banded LU with partial pivoting).
std::vector<double> solve_tridiagonal(const TridiagonalMatrix& T, std::vector<double> b);

/// Solves the dense n x n system a x = b by Gaussian elimination with partial
/// pivoting; `a` is row-major. Intended for small low-rank correction systems.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, int n);

/// Solver for (B + s * G^T G) x = r with B banded and G given by its rows
/// (each of length n), using the Woodbury identity: only B is factorized,
/// plus one dense r x r capacitance system.
class LowRankCorrectedSolver {
 public:
  LowRankCorrectedSolver(BandedMatrix b, const std::vector<std::vector<double>>& g_rows,
                         double s);

  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  BandedLU lu_;
  std::vector<std::vector<double>> g_rows_;
  std::vector<std::vector<double>> z_cols_;  ///< B^{-1} g_m
  std::vector<double> capacitance_;          ///< I + s * G Z (row-major)
  double s_ = 0.0;
};

}  // namespace cif
