#pragma once

// Small dense linear algebra: row-major matrices, validated symmetric
// matrices and a cyclic Jacobi eigensolver. Sizes stay in the tens, so
// nothing here is blocked or vectorised.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace heis {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double norm_squared(std::span<const double> a);
bool all_finite(std::span<const double> a);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  Vector column(std::size_t j) const;
  Matrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> v);

/// Dense symmetric matrix. Construction from arbitrary data checks finiteness
/// and symmetry (absolute tolerance kSymmetryTol) and then stores the exact
/// symmetric part, so every SymMatrix in circulation is bitwise symmetric.
class SymMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  SymMatrix() = default;
  explicit SymMatrix(std::size_t n);
  explicit SymMatrix(const Matrix& m, double tol = kSymmetryTol);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> diag);
  /// Row-major n*n data.
  static SymMatrix from_row_major(std::size_t n, std::span<const double> data,
                                  double tol = kSymmetryTol);

  std::size_t size() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  /// Sets (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);

  const Matrix& matrix() const { return m_; }
  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;

  SymMatrix operator-() const;
  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

 private:
  Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// Q^T M Q for a rectangular Q (rows = M.size()).
SymMatrix congruence(const Matrix& q, const SymMatrix& m);
/// a a^T
SymMatrix outer(std::span<const double> a);

struct JacobiOptions {
  /// Stop when the off-diagonal Frobenius norm is below rel_tol * ||M||_F.
  double rel_tol = 1e-13;
  int max_sweeps = 64;
};

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

SymEigen sym_eigen(const SymMatrix& m, const JacobiOptions& opts = {});
Vector sym_eigenvalues(const SymMatrix& m, const JacobiOptions& opts = {});

}  // namespace heis
