#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "lrs/eigen.hpp"
#include "lrs/synth.hpp"

using namespace lrs;

TEST_CASE("gen_low_rank at n = k0 = 1 squares the single draw") {
  const std::uint64_t seed = 4242;
  auto [m0, l0] = gen_low_rank(1, 1, seed);
  Rng rng(seed);
  const double draw = rng.next_gaussian();
  CHECK(m0(0, 0) == draw);
  CHECK(l0(0, 0) == draw * draw);
}

TEST_CASE("gen_low_rank produces exact rank k0") {
  auto [m0, l0] = gen_low_rank(30, 4, 9);
  const auto dec = sym_eigen(l0);
  const double thr = 1e-10 * frobenius(l0);
  int above = 0;
  for (double lambda : dec.eigenvalues)
    if (lambda > thr) ++above;
  CHECK(above == 4);
}

TEST_CASE("generators are reproducible per seed") {
  auto [ma, la] = gen_low_rank(12, 3, 5);
  auto [mb, lb] = gen_low_rank(12, 3, 5);
  CHECK(ma.data() == mb.data());

  const auto sa = gen_sparse_psd(15, 0.9, 5);
  const auto sb = gen_sparse_psd(15, 0.9, 5);
  CHECK(sa.s0.data() == sb.s0.data());
  CHECK(sa.pairs_used == sb.pairs_used);

  const auto ia = gen_instance(10, 2, 0.9, 31);
  const auto ib = gen_instance(10, 2, 0.9, 31);
  CHECK(ia.sigma.data() == ib.sigma.data());
}

TEST_CASE("pair matrices are PSD by construction") {
  const SymMatrix a = pair_matrix(3, 0, 1, 0.7, 0.5);
  CHECK(a(0, 0) == 0.7);
  CHECK(a(1, 1) == 0.7);
  CHECK(a(0, 1) == 0.5);
  CHECK(a(1, 0) == 0.5);
  CHECK(a(2, 2) == 0.0);
  CHECK(a(0, 2) == 0.0);
  // 2x2 block eigenvalues are a +- b >= 0
  const auto dec = sym_eigen(a);
  CHECK(dec.eigenvalues.front() == Catch::Approx(1.2));
  CHECK(dec.eigenvalues.back() >= -1e-15);
}

TEST_CASE("gen_sparse_psd stops at the last state at or above the target") {
  const auto res = gen_sparse_psd(20, 0.95, 7);
  CHECK(res.exact_zero_sparsity >= 0.95);
  CHECK(res.exact_zero_sparsity <= 0.95 + 6.0 / 400.0);
  CHECK(res.thresholded_sparsity >= res.exact_zero_sparsity);

  // recount untouched entries against the reported exact-zero sparsity
  long zero_count = 0;
  for (double x : res.s0.data())
    if (x == 0.0) ++zero_count;
  CHECK(static_cast<double>(zero_count) / 400.0 >= res.exact_zero_sparsity);

  // off-diagonal support size doubles the number of pairs used (sampling
  // without replacement never writes the same off-diagonal twice)
  long offdiag_support = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (i != j && res.s0(i, j) != 0.0) ++offdiag_support;
  CHECK(offdiag_support == 2 * res.pairs_used);
}

TEST_CASE("gen_sparse_psd output is PSD across instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = gen_sparse_psd(12, 0.8, seed);
    CHECK(min_eigenvalue(res.s0) >= -1e-12 * std::max(frobenius(res.s0), 1e-30));
  }
}

TEST_CASE("gen_sparse_psd validates its target") {
  CHECK_THROWS_AS(gen_sparse_psd(10, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(gen_sparse_psd(10, 1.0, 1), ConfigError);
}

TEST_CASE("gen_instance composes the two generators") {
  const SynthInstance inst = gen_instance(18, 3, 0.9, 55);
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 18; ++j)
      CHECK(inst.sigma(i, j) == inst.low_rank0(i, j) + inst.sparse0(i, j));
  CHECK(min_eigenvalue(inst.sigma) >= -1e-10 * frobenius(inst.sigma));
  CHECK(inst.k0 == 3);
  CHECK(inst.s0_achieved >= 0.9);
}

TEST_CASE("benchmark-scale generation stays fast and close to the target") {
  const auto t0 = std::chrono::steady_clock::now();
  const SynthInstance inst = gen_instance(100, 10, 0.95, 3);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  CHECK(std::fabs(inst.s0_achieved - 0.95) <= 0.01);
  CHECK(std::fabs(inst.s0_exact_zero - 0.95) <= 0.01);

  const SynthInstance wide = gen_instance(50, 5, 0.8, 4);
  CHECK(std::fabs(wide.s0_exact_zero - 0.8) <= 0.01);
}
