#include "heisliou/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace heis {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_squared(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm_squared(a)); }

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ----- Matrix -----

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
  Vector r(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

// ----- SymMatrix -----

SymMatrix::SymMatrix(std::size_t n) : m_(n, n) {}

SymMatrix::SymMatrix(const Matrix& m, double tol) : m_(m.rows(), m.cols()) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  if (!all_finite(m.data())) throw std::invalid_argument("SymMatrix: non-finite entry");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw std::invalid_argument("SymMatrix: asymmetry " +
                                    std::to_string(std::abs(m(i, j) - m(j, i))) + " at (" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    ") exceeds tolerance");
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("SymMatrix: ragged initializer");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  *this = SymMatrix(m);
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.m_(i, i) = diag[i];
  if (!all_finite(diag)) throw std::invalid_argument("SymMatrix: non-finite entry");
  return s;
}

SymMatrix SymMatrix::from_row_major(std::size_t n, std::span<const double> data, double tol) {
  if (data.size() != n * n) throw std::invalid_argument("SymMatrix: expected n*n entries");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = data[i * n + j];
  return SymMatrix(m, tol);
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size(); ++i) t += m_(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const { return norm(m_.data()); }

double SymMatrix::max_abs() const {
  double r = 0.0;
  for (double v : m_.data()) r = std::max(r, std::abs(v));
  return r;
}

SymMatrix SymMatrix::operator-() const {
  SymMatrix r(*this);
  r *= -1.0;
  return r;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.size() != size()) throw std::invalid_argument("SymMatrix: size mismatch");
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) m_(i, j) += o.m_(i, j);
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) m_(i, j) *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a += -b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix congruence(const Matrix& q, const SymMatrix& m) {
  if (q.rows() != m.size()) throw std::invalid_argument("congruence: shape mismatch");
  const std::size_t k = q.cols();
  const Matrix mq = m.matrix() * q;
  SymMatrix r(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < q.rows(); ++l) s += q(l, i) * mq(l, j);
      r.set(i, j, s);
    }
  return r;
}

SymMatrix outer(std::span<const double> a) {
  SymMatrix r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i; j < a.size(); ++j) r.set(i, j, a[i] * a[j]);
  return r;
}

// ----- Jacobi eigensolver -----

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// One plane rotation annihilating a(p,q); applied to both halves of a and to
// the columns of v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);
  const std::size_t n = a.rows();

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double np = arp - s * (arq + tau * arp);
    const double nq = arq + s * (arp - tau * arq);
    a(r, p) = np;
    a(p, r) = np;
    a(r, q) = nq;
    a(q, r) = nq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

}  // namespace

SymEigen sym_eigen(const SymMatrix& m, const JacobiOptions& opts) {
  if (!all_finite(m.matrix().data())) throw std::invalid_argument("sym_eigen: non-finite entry");
  const std::size_t n = m.size();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = m.frobenius_norm();
  const double target = opts.rel_tol * scale;

  SymEigen out;
  while (off_diagonal_norm(a) > target) {
    if (out.sweeps == opts.max_sweeps)
      throw std::runtime_error("sym_eigen: Jacobi iteration did not converge in " +
                               std::to_string(opts.max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++out.sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Vector sym_eigenvalues(const SymMatrix& m, const JacobiOptions& opts) {
  return sym_eigen(m, opts).values;
}

}  // namespace heis
