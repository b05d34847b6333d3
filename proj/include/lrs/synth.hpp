#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"
#include "lrs/metrics.hpp"
#include "lrs/rng.hpp"

namespace lrs {

/// Ground-truth benchmark case: Sigma = L0 + S0 with L0 of rank k0 and
/// sparse PSD S0.
struct SynthInstance {
  SymMatrix sigma;
  SymMatrix low_rank0;
  SymMatrix sparse0;
  DenseMatrix factor0;
  int k0 = 0;
  double s0_target = 0.0;
  double s0_achieved = 0.0;    // thresholded sparsity (|entry| <= 0.01 counts null)
  double s0_exact_zero = 0.0;  // fraction of entries never touched by a pair
  std::uint64_t seed = 0;
};

/// M0 is n-by-k0 with i.i.d. standard normals drawn row-major; L0 = M0 M0^T.
inline std::pair<DenseMatrix, SymMatrix> gen_low_rank(int n, int k0, std::uint64_t seed) {
  if (k0 < 1 || k0 > n)
    throw ConfigError("gen_low_rank: need 1 <= k0 <= n, got k0=" + std::to_string(k0) +
                      " n=" + std::to_string(n));
  Rng rng(seed);
  DenseMatrix m(n, k0);
  for (auto& x : m.data()) x = rng.next_gaussian();
  return {m, SymMatrix::from_factor(m)};
}

/// The 4-nonzero PSD building block: entries (i,j) = (j,i) = b and
/// (i,i) = (j,j) = a with a >= |b|.
inline SymMatrix pair_matrix(int n, int i, int j, double a, double b) {
  SymMatrix s(n);
  s.set(i, j, b);
  s.set(i, i, a);
  s.set(j, j, a);
  return s;
}

struct SparseGenResult {
  SymMatrix s0;
  double exact_zero_sparsity = 1.0;
  double thresholded_sparsity = 1.0;
  int pairs_used = 0;
};

/// Accumulates pair matrices over distinct pairs (i, j), i < j, drawn
/// without replacement, with b ~ U[-1, 1] and a ~ U[|b|, 1]. Stops at the
/// last state whose exact-zero sparsity is still >= s0 (never overshoots
/// below the target).
inline SparseGenResult gen_sparse_psd(int n, double s0, std::uint64_t seed) {
  if (!(s0 > 0.0 && s0 < 1.0)) throw ConfigError("gen_sparse_psd: need 0 < s0 < 1");
  if (n < 2) throw ConfigError("gen_sparse_psd: need n >= 2");
  Rng rng(seed);

  std::vector<std::pair<int, int>> pool;
  pool.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pool.emplace_back(i, j);
  for (std::size_t t = pool.size() - 1; t > 0; --t)
    std::swap(pool[t], pool[rng.next_below(t + 1)]);

  SparseGenResult res;
  res.s0 = SymMatrix(n);
  std::vector<bool> diag_touched(n, false);
  const double total = static_cast<double>(n) * n;
  long touched = 0;

  for (const auto& [i, j] : pool) {
    long prospective = touched + 2;  // the off-diagonal pair is always new
    if (!diag_touched[i]) ++prospective;
    if (!diag_touched[j]) ++prospective;
    if ((total - static_cast<double>(prospective)) / total < s0) break;

    const double b = rng.next_uniform(-1.0, 1.0);
    const double a = rng.next_uniform(std::fabs(b), 1.0);
    res.s0.add(i, j, b);
    res.s0.add(i, i, a);
    res.s0.add(j, j, a);
    diag_touched[i] = diag_touched[j] = true;
    touched = prospective;
    ++res.pairs_used;
  }
  res.exact_zero_sparsity = (total - static_cast<double>(touched)) / total;
  if (res.exact_zero_sparsity < s0)
    throw GenerationError("gen_sparse_psd: sparsity accounting fell below target");
  res.thresholded_sparsity = sparsity(res.s0, 0.01);
  return res;
}

/// Seed layout: the low-rank factor uses `seed`, the sparse part uses
/// seed ^ 0x5350415253450000 ("SPARSE" tag) so the two streams never collide.
inline SynthInstance gen_instance(int n, int k0, double s0, std::uint64_t seed) {
  SynthInstance inst;
  inst.k0 = k0;
  inst.s0_target = s0;
  inst.seed = seed;
  auto [m0, l0] = gen_low_rank(n, k0, seed);
  inst.factor0 = std::move(m0);
  inst.low_rank0 = std::move(l0);
  auto sp = gen_sparse_psd(n, s0, seed ^ 0x5350415253450000ULL);
  inst.sparse0 = std::move(sp.s0);
  inst.s0_achieved = sp.thresholded_sparsity;
  inst.s0_exact_zero = sp.exact_zero_sparsity;
  inst.sigma = inst.low_rank0 + inst.sparse0;
  return inst;
}

}  // namespace lrs
