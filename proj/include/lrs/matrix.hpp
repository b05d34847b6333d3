#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lrs/errors.hpp"

namespace lrs {

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1)
      throw DimensionError("DenseMatrix: dimensions must be positive, got " +
                           std::to_string(rows) + "x" + std::to_string(cols));
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric n-by-n matrix. Full storage; construction paths keep
/// entries(i,j) == entries(j,i) bit-exact.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n) {
    if (n < 1) throw DimensionError("SymMatrix: dimension must be >= 1, got " + std::to_string(n));
    data_.assign(static_cast<std::size_t>(n) * n, 0.0);
  }

  int dim() const { return n_; }

  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  /// Sets (i,j) and (j,i) to the same value.
  void set(int i, int j, double v) {
    data_[static_cast<std::size_t>(i) * n_ + j] = v;
    data_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  const std::vector<double>& data() const { return data_; }

  /// (A + A^T) / 2.
  static SymMatrix symmetrized(const DenseMatrix& a) {
    if (a.rows() != a.cols())
      throw DimensionError("symmetrized: matrix is not square (" + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()) + ")");
    SymMatrix s(a.rows());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = i; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return s;
  }

  static SymMatrix identity(int n) {
    SymMatrix s(n);
    for (int i = 0; i < n; ++i) s.set(i, i, 1.0);
    return s;
  }

  /// M M^T for an n-by-k factor; the upper triangle is computed once and
  /// mirrored, so the result is exactly symmetric.
  static SymMatrix from_factor(const DenseMatrix& m) {
    SymMatrix s(m.rows());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = i; j < m.rows(); ++j) {
        double acc = 0.0;
        for (int c = 0; c < m.cols(); ++c) acc += m(i, c) * m(j, c);
        s.set(i, j, acc);
      }
    return s;
  }

  SymMatrix operator+(const SymMatrix& o) const { return combined(o, +1.0); }
  SymMatrix operator-(const SymMatrix& o) const { return combined(o, -1.0); }

  DenseMatrix to_dense() const {
    DenseMatrix d(n_, n_);
    d.data() = data_;
    return d;
  }

 private:
  SymMatrix combined(const SymMatrix& o, double sign) const {
    if (o.n_ != n_)
      throw DimensionError("SymMatrix: dimension mismatch " + std::to_string(n_) + " vs " +
                           std::to_string(o.n_));
    SymMatrix r(n_);
    for (std::size_t t = 0; t < data_.size(); ++t) r.data_[t] = data_[t] + sign * o.data_[t];
    return r;
  }

  int n_ = 0;
  std::vector<double> data_;
};

// ---- half-vectorization h and its inverse ------------------------------

/// Upper triangle including the diagonal, row by row:
/// (S11, ..., S1n, S22, ..., S2n, ..., Snn). Length n(n+1)/2.
inline std::vector<double> half_vectorize(const SymMatrix& s) {
  const int n = s.dim();
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v.push_back(s(i, j));
  return v;
}

inline SymMatrix half_unvectorize(const std::vector<double>& v, int n) {
  if (n < 1 || v.size() != static_cast<std::size_t>(n) * (n + 1) / 2)
    throw DimensionError("half_unvectorize: vector of length " + std::to_string(v.size()) +
                         " does not match n=" + std::to_string(n));
  SymMatrix s(n);
  std::size_t t = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, v[t++]);
  return s;
}

// ---- matricization g and its inverse -----------------------------------

/// Row-after-row fill of an n-by-k matrix: out(i,j) = v[i*k + j].
inline DenseMatrix matricize(const std::vector<double>& v, int n, int k) {
  if (n < 1 || k < 1 || v.size() != static_cast<std::size_t>(n) * k)
    throw DimensionError("matricize: vector of length " + std::to_string(v.size()) +
                         " does not match " + std::to_string(n) + "x" + std::to_string(k));
  DenseMatrix m(n, k);
  m.data() = v;
  return m;
}

inline std::vector<double> vectorize_matrix(const DenseMatrix& m) { return m.data(); }

// ---- norms --------------------------------------------------------------

inline double frobenius(const DenseMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc += x * x;
  return std::sqrt(acc);
}

inline double frobenius(const SymMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc += x * x;
  return std::sqrt(acc);
}

inline double l1_entrywise(const DenseMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc += std::fabs(x);
  return acc;
}

inline double l1_entrywise(const SymMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc += std::fabs(x);
  return acc;
}

inline double max_abs(const SymMatrix& m) {
  double acc = 0.0;
  for (double x : m.data()) acc = std::max(acc, std::fabs(x));
  return acc;
}

/// ||X||_S := ||h(X)||, the Euclidean norm of the half-vectorization.
inline double sym_norm(const SymMatrix& s) {
  double acc = 0.0;
  const int n = s.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) acc += s(i, j) * s(i, j);
  return std::sqrt(acc);
}

// ---- small dense kernels --------------------------------------------------

inline std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(a.cols()))
    throw DimensionError("matvec: vector length " + std::to_string(x.size()) +
                         " does not match cols=" + std::to_string(a.cols()));
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

inline std::vector<double> matvec_transposed(const DenseMatrix& a, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(a.rows()))
    throw DimensionError("matvec_transposed: vector length " + std::to_string(x.size()) +
                         " does not match rows=" + std::to_string(a.rows()));
  std::vector<double> y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (int j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("multiply: inner dimensions differ, " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()));
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int t = 0; t < a.cols(); ++t) {
      const double ait = a(i, t);
      if (ait == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += ait * b(t, j);
    }
  return c;
}

inline DenseMatrix outer(const std::vector<double>& u, const std::vector<double>& v) {
  DenseMatrix m(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = u[i] * v[j];
  return m;
}

}  // namespace lrs
