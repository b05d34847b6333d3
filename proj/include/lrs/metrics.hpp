#pragma once

#include <cmath>
#include <optional>

#include "lrs/eigen.hpp"
#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"

namespace lrs {

/// Number of eigenvalues strictly larger than eps. Ties at eps count as null.
inline int approx_rank(const SymMatrix& l, double eps = 0.01) {
  const auto d = sym_eigen(l);
  int count = 0;
  for (double lambda : d.eigenvalues)
    if (lambda > eps) ++count;
  return count;
}

/// Fraction of the n^2 entries that are null, i.e. not strictly larger
/// than eps in absolute value.
inline double sparsity(const SymMatrix& s, double eps = 0.01) {
  long nulls = 0;
  for (double x : s.data())
    if (!(std::fabs(x) > eps)) ++nulls;
  return static_cast<double>(nulls) / static_cast<double>(s.data().size());
}

inline double rel_error(const SymMatrix& x, const SymMatrix& x0) {
  const double ref = frobenius(x0);
  if (ref == 0.0) throw NumericalError("rel_error: reference matrix has zero Frobenius norm");
  return frobenius(x - x0) / ref;
}

/// Entrywise soft threshold sign(x) * max(|x| - threshold, 0).
inline SymMatrix shrink(const SymMatrix& s, double threshold) {
  if (threshold < 0.0) throw ConfigError("shrink: threshold must be >= 0");
  SymMatrix out(s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = i; j < s.dim(); ++j) {
      const double x = s(i, j);
      const double mag = std::fabs(x) - threshold;
      out.set(i, j, mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0);
    }
  return out;
}

inline double default_shrink_threshold(int n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

/// Evaluation quantities for one decomposition; sparsity and the S-error
/// are reported both raw and after shrinkage, since the two are compared
/// side by side.
struct EvalReport {
  int r_l = 0;
  double s_s = 0.0;
  double s_s_shrunk = 0.0;
  double rel_err_l = -1.0;        // -1 when no ground truth
  double rel_err_s = -1.0;
  double rel_err_s_shrunk = -1.0;
  double rel_err_sum = 0.0;       // ||L + S - Sigma||_F / ||Sigma||_F
  double rel_err_sum_shrunk = 0.0;
  double min_eig_l = 0.0;
  double epsilon_threshold = 0.01;
  double shrink_threshold = 0.0;
};

inline EvalReport evaluate_decomposition(const SymMatrix& low_rank, const SymMatrix& sparse,
                                         const SymMatrix& sigma,
                                         const SymMatrix* true_low_rank = nullptr,
                                         const SymMatrix* true_sparse = nullptr,
                                         double eps = 0.01,
                                         std::optional<double> shrink_thr = std::nullopt) {
  EvalReport rep;
  rep.epsilon_threshold = eps;
  rep.shrink_threshold = shrink_thr ? *shrink_thr : default_shrink_threshold(sigma.dim());
  rep.r_l = approx_rank(low_rank, eps);
  rep.s_s = sparsity(sparse, eps);
  const SymMatrix shrunk = shrink(sparse, rep.shrink_threshold);
  rep.s_s_shrunk = sparsity(shrunk, eps);
  const double sigma_norm = frobenius(sigma);
  if (sigma_norm > 0.0) {
    rep.rel_err_sum = frobenius(low_rank + sparse - sigma) / sigma_norm;
    rep.rel_err_sum_shrunk = frobenius(low_rank + shrunk - sigma) / sigma_norm;
  }
  if (true_low_rank) rep.rel_err_l = rel_error(low_rank, *true_low_rank);
  if (true_sparse) {
    rep.rel_err_s = rel_error(sparse, *true_sparse);
    rep.rel_err_s_shrunk = rel_error(shrunk, *true_sparse);
  }
  rep.min_eig_l = min_eigenvalue(low_rank);
  return rep;
}

}  // namespace lrs
