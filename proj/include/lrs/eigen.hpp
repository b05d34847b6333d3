#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"

namespace lrs {

/// Eigenvalues sorted descending; eigenvectors(:,i) belongs to eigenvalues[i].
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;
};

namespace detail {
inline double off_diagonal_norm(const DenseMatrix& a) {
  double acc = 0.0;
  for (int p = 0; p < a.rows(); ++p)
    for (int q = p + 1; q < a.cols(); ++q) acc += 2.0 * a(p, q) * a(p, q);
  return std::sqrt(acc);
}
}  // namespace detail

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline EigenDecomposition sym_eigen(const SymMatrix& s, int max_sweeps = 100) {
  const int n = s.dim();
  DenseMatrix a = s.to_dense();
  DenseMatrix v = DenseMatrix::identity(n);

  const double scale = frobenius(s);
  const double tol = 1e-15 * std::max(scale, 1e-300);

  bool converged = (n == 1);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    if (detail::off_diagonal_norm(a) <= tol) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip - sn * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + sn * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - sn * (viq + tau * vip);
          v(i, q) = viq + sn * (vip - tau * viq);
        }
      }
    }
  }
  if (!converged && detail::off_diagonal_norm(a) > tol)
    throw NumericalError("sym_eigen: Jacobi sweeps did not converge within " +
                         std::to_string(max_sweeps) + " sweeps");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors = DenseMatrix(n, n);
  for (int c = 0; c < n; ++c) {
    d.eigenvalues[c] = a(order[c], order[c]);
    for (int r = 0; r < n; ++r) d.eigenvectors(r, c) = v(r, order[c]);
  }
  return d;
}

inline double min_eigenvalue(const SymMatrix& s) {
  const auto d = sym_eigen(s);
  return d.eigenvalues.back();
}

inline double spectral_norm(const SymMatrix& s) {
  const auto d = sym_eigen(s);
  double m = 0.0;
  for (double x : d.eigenvalues) m = std::max(m, std::fabs(x));
  return m;
}

/// V diag(f(lambda)) V^T, mirrored to an exactly symmetric result.
inline SymMatrix reassemble(const EigenDecomposition& d, const std::vector<double>& lambda) {
  const int n = d.eigenvectors.rows();
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += d.eigenvectors(i, c) * lambda[c] * d.eigenvectors(j, c);
      out.set(i, j, acc);
    }
  return out;
}

}  // namespace lrs
