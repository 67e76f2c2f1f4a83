#include "cif/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cif {

TridiagonalMatrix TridiagonalMatrix::zero(int n) {
  TridiagonalMatrix t;
  t.diag.assign(n, 0.0);
  if (n > 0) {
    t.sub.assign(n - 1, 0.0);
    t.super.assign(n - 1, 0.0);
  }
  return t;
}

std::vector<double> TridiagonalMatrix::apply(const std::vector<double>& x) const {
  const int m = n();
  if (static_cast<int>(x.size()) != m)
    throw std::invalid_argument("TridiagonalMatrix::apply: size mismatch");
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += sub[i - 1] * x[i - 1];
    if (i + 1 < m) v += super[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

void TridiagonalMatrix::add_scaled(double s, const TridiagonalMatrix& other) {
  if (other.n() != n())
    throw std::invalid_argument("TridiagonalMatrix::add_scaled: size mismatch");
  for (int i = 0; i < n(); ++i) diag[i] += s * other.diag[i];
  for (int i = 0; i + 1 < n(); ++i) {
    sub[i] += s * other.sub[i];
    super[i] += s * other.super[i];
  }
}

TridiagonalMatrix TridiagonalMatrix::scaled(double s) const {
  TridiagonalMatrix t = *this;
  for (auto& v : t.sub) v *= s;
  for (auto& v : t.diag) v *= s;
  for (auto& v : t.super) v *= s;
  return t;
}

double bilinear(const TridiagonalMatrix& A, const std::vector<double>& x,
                const std::vector<double>& y) {
  const auto Ay = A.apply(y);
  double s = 0.0;
  for (int i = 0; i < A.n(); ++i) s += x[i] * Ay[i];
  return s;
}

SparseMatrix SparseMatrix::zero(int rows, int cols) {
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.entries.resize(rows);
  return m;
}

double SparseMatrix::at(int i, int j) const {
  const auto& row = entries.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const auto& e, int col) { return e.first < col; });
  if (it != row.end() && it->first == j) return it->second;
  return 0.0;
}

void SparseMatrix::add(int i, int j, double v) {
  if (i < 0 || i >= rows || j < 0 || j >= cols)
    throw std::out_of_range("SparseMatrix::add: index out of range");
  auto& row = entries[i];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const auto& e, int col) { return e.first < col; });
  if (it != row.end() && it->first == j)
    it->second += v;
  else
    row.insert(it, {j, v});
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols)
    throw std::invalid_argument("SparseMatrix::apply: size mismatch");
  std::vector<double> y(rows, 0.0);
  for (int i = 0; i < rows; ++i)
    for (const auto& [j, v] : entries[i]) y[i] += v * x[j];
  return y;
}

std::size_t SparseMatrix::nnz() const {
  std::size_t s = 0;
  for (const auto& row : entries) s += row.size();
  return s;
}

// Band storage: entry (i, j) lives at row(i)[(j - i) + kl]. Stored diagonal
// offsets run over j - i in [-kl, kl + ku]; the kl slots above ku are the
// headroom that pivoted LU fill spills into.

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
  if (n < 1 || kl < 0 || ku < 0)
    throw std::invalid_argument("BandedMatrix: bad dimensions");
  storage_.assign(static_cast<std::size_t>(n) * width(), 0.0);
}

BandedMatrix BandedMatrix::from_tridiagonal(const TridiagonalMatrix& t, int kl, int ku) {
  if (kl < 1 || ku < 1)
    throw std::invalid_argument("BandedMatrix::from_tridiagonal: need kl, ku >= 1");
  BandedMatrix b(t.n(), kl, ku);
  b.add_tridiagonal(1.0, t);
  return b;
}

double& BandedMatrix::at(int i, int j) {
  const int d = j - i;
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || d < -kl_ || d > kl_ + ku_)
    throw std::out_of_range("BandedMatrix::at: outside stored band");
  return row(i)[d + kl_];
}

double BandedMatrix::get(int i, int j) const {
  const int d = j - i;
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || d < -kl_ || d > kl_ + ku_) return 0.0;
  return row(i)[d + kl_];
}

void BandedMatrix::add_tridiagonal(double s, const TridiagonalMatrix& t) {
  if (t.n() != n_)
    throw std::invalid_argument("BandedMatrix::add_tridiagonal: size mismatch");
  if (kl_ < 1 || ku_ < 1)
    throw std::invalid_argument("BandedMatrix::add_tridiagonal: band too narrow");
  for (int i = 0; i < n_; ++i) at(i, i) += s * t.diag[i];
  for (int i = 0; i + 1 < n_; ++i) {
    at(i + 1, i) += s * t.sub[i];
    at(i, i + 1) += s * t.super[i];
  }
}

std::vector<double> BandedMatrix::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("BandedMatrix::apply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - kl_);
    const int hi = std::min(n_ - 1, i + ku_);
    double v = 0.0;
    for (int j = lo; j <= hi; ++j) v += get(i, j) * x[j];
    y[i] = v;
  }
  return y;
}

BandedLU::BandedLU(BandedMatrix a) : a_(std::move(a)), pivot_(a_.n()) {
  const int n = a_.n();
  const int kl = a_.kl();
  const int ku = a_.ku();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a_.get(col, col));
    for (int r = col + 1; r <= std::min(n - 1, col + kl); ++r) {
      const double v = std::abs(a_.get(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("BandedLU: singular matrix");
    pivot_[col] = piv;
    if (piv != col) {
      for (int j = col; j <= std::min(n - 1, col + kl + ku); ++j)
        std::swap(a_.at(col, j), a_.at(piv, j));
    }
    const double d = a_.at(col, col);
    for (int r = col + 1; r <= std::min(n - 1, col + kl); ++r) {
      const double m = a_.at(r, col) / d;
      a_.at(r, col) = m;  // multiplier kept in the L slot
      if (m != 0.0) {
        for (int j = col + 1; j <= std::min(n - 1, col + kl + ku); ++j)
          a_.at(r, j) -= m * a_.at(col, j);
      }
    }
  }
}

void BandedLU::solve_in_place(std::vector<double>& b) const {
  const int n = a_.n();
  const int kl = a_.kl();
  const int ku = a_.ku();
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("BandedLU::solve: size mismatch");
  for (int col = 0; col < n; ++col) {
    if (pivot_[col] != col) std::swap(b[col], b[pivot_[col]]);
    for (int r = col + 1; r <= std::min(n - 1, col + kl); ++r)
      b[r] -= a_.get(r, col) * b[col];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j <= std::min(n - 1, i + kl + ku); ++j) v -= a_.get(i, j) * b[j];
    b[i] = v / a_.get(i, i);
  }
}

std::vector<double> BandedLU::solve(std::vector<double> b) const {
  solve_in_place(b);
  return b;
}

std::vector<double> solve_tridiagonal(const TridiagonalMatrix& T, std::vector<double> b) {
  BandedLU lu(BandedMatrix::from_tridiagonal(T));
  lu.solve_in_place(b);
  return b;
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, int n) {
  if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("dense_solve: size mismatch");
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r * n + col] / a[col * n + col];
      if (m == 0.0) continue;
      for (int j = col; j < n; ++j) a[r * n + j] -= m * a[col * n + j];
      b[r] -= m * b[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j < n; ++j) v -= a[i * n + j] * b[j];
    b[i] = v / a[i * n + i];
  }
  return b;
}

LowRankCorrectedSolver::LowRankCorrectedSolver(BandedMatrix b,
                                               const std::vector<std::vector<double>>& g_rows,
                                               double s)
    : lu_(std::move(b)), g_rows_(g_rows), s_(s) {
  const int r = static_cast<int>(g_rows_.size());
  z_cols_.reserve(r);
  for (const auto& g : g_rows_) z_cols_.push_back(lu_.solve(g));
  capacitance_.assign(static_cast<std::size_t>(r) * r, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      double dot = 0.0;
      for (std::size_t m = 0; m < g_rows_[i].size(); ++m) dot += g_rows_[i][m] * z_cols_[j][m];
      capacitance_[i * r + j] = (i == j ? 1.0 : 0.0) + s_ * dot;
    }
  }
}

std::vector<double> LowRankCorrectedSolver::solve(const std::vector<double>& rhs) const {
  std::vector<double> w = lu_.solve(rhs);
  const int r = static_cast<int>(g_rows_.size());
  if (r == 0 || s_ == 0.0) return w;
  std::vector<double> gw(r, 0.0);
  for (int i = 0; i < r; ++i) {
    double dot = 0.0;
    for (std::size_t m = 0; m < g_rows_[i].size(); ++m) dot += g_rows_[i][m] * w[m];
    gw[i] = s_ * dot;
  }
  const std::vector<double> c = dense_solve(capacitance_, gw, r);
  for (int j = 0; j < r; ++j)
    for (std::size_t m = 0; m < w.size(); ++m) w[m] -= z_cols_[j][m] * c[j];
  return w;
}

}  // namespace cif
