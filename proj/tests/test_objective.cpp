#include <catch2/catch_amalgamated.hpp>

#include "lrs/metrics.hpp"
#include "lrs/objective.hpp"
#include "lrs/oracles.hpp"

using namespace lrs;

namespace {
SymMatrix random_sym(int n, Rng& rng, double scale = 1.0) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, rng.next_uniform(-scale, scale));
  return s;
}

NetParams random_params(const Architecture& arch, Rng& rng, double bias_scale = 0.5) {
  NetParams p = init_params(arch, rng.next_u64(), InitScheme::UniformFanIn);
  for (auto& l : p.layers)
    for (auto& b : l.bias) b = rng.next_uniform(-bias_scale, bias_scale);
  return p;
}

/// Zero-residual construction: with all weights zero the output is the
/// final bias regardless of the input, so Sigma = g(d) g(d)^T is exact.
std::pair<NetParams, SymMatrix> planted_stationary(const Architecture& arch, Rng& rng) {
  NetParams p = init_params(arch, 0, InitScheme::Zeros);
  for (auto& d : p.layers.back().bias) d = rng.next_uniform(-1, 1);
  const DenseMatrix m = matricize(p.layers.back().bias, arch.n, arch.k);
  return {std::move(p), SymMatrix::from_factor(m)};
}
}  // namespace

TEST_CASE("phi equals n^2 mu(0) at zero residual") {
  Rng rng(5);
  Architecture arch{4, 2, {3}, Activation::Tanh};
  auto [p, sigma] = planted_stationary(arch, rng);
  const double eps = 1e-4;
  const double phi = eval_phi(p, sigma, arch, SmoothAbs(SmoothKind::Huber, eps));
  CHECK(phi == Catch::Approx(16.0 * eps / 2.0).epsilon(1e-12));
}

TEST_CASE("phi on the identity with zero parameters") {
  const int n = 5;
  Architecture arch{n, 2, {4}, Activation::Tanh};
  const NetParams p = init_params(arch, 0, InitScheme::Zeros);
  const double eps = 1e-4;
  const double phi =
      eval_phi(p, SymMatrix::identity(n), arch, SmoothAbs(SmoothKind::Huber, eps));
  // residual is -I: n entries at mu(-1) = 1, the rest at mu(0) = eps/2
  CHECK(phi == Catch::Approx(n + (n * n - n) * eps / 2.0).epsilon(1e-12));
}

TEST_CASE("phi matches a from-scratch evaluation") {
  Rng rng(7);
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  const SmoothAbs mu(SmoothKind::Huber, 1e-3);
  const NetParams p = random_params(arch, rng);
  const double phi = eval_phi(p, sigma, arch, mu);

  const auto fc = forward(arch, p, half_vectorize(sigma));
  const DenseMatrix m = matricize(fc.output, 4, 2);
  double expect = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double lij = 0.0;
      for (int s = 0; s < 2; ++s) lij += m(i, s) * m(j, s);
      expect += mu.value(lij - sigma(i, j));
    }
  CHECK(phi == Catch::Approx(expect).epsilon(1e-13));
}

TEST_CASE("phi is nonnegative") {
  Rng rng(100);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + (t % 4);
    Architecture arch{n, 1 + (t % 2), {4}, Activation::ScaledArctan};
    const SymMatrix sigma = random_sym(n, rng, 2.0);
    const NetParams p = random_params(arch, rng);
    CHECK(eval_phi(p, sigma, arch, SmoothAbs(SmoothKind::LogCosh, 1e-3)) >= 0.0);
  }
}

TEST_CASE("sandwich between the l1 norm and its smoothed value") {
  const auto rep = gradcheck_sandwich(2024, 30);
  for (const auto& c : rep.cases) {
    INFO(c.label);
    CHECK(c.pass);
  }
}

TEST_CASE("output-bias gradient vanishes when X = 0 and Sigma = 0") {
  Architecture arch{3, 2, {4}, Activation::Tanh};
  const NetParams p = init_params(arch, 0, InitScheme::Zeros);
  const NetParams g = grad_phi(p, SymMatrix(3), arch, SmoothAbs(SmoothKind::Huber, 1e-4));
  for (double d : g.layers.back().bias) CHECK(d == 0.0);
}

TEST_CASE("reverse mode equals the lemma closed forms on single-layer instances") {
  const auto rep = gradcheck_lemma(99, 25, 1e-12);
  for (const auto& c : rep.cases) {
    INFO(c.label << " err=" << c.error);
    CHECK(c.pass);
  }
}

TEST_CASE("lemma ratio identities hold coefficient by coefficient") {
  Rng rng(13);
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  PhiObjective obj(sigma, arch, SmoothAbs(SmoothKind::Huber, 1e-3));
  const NetParams p = random_params(arch, rng);
  const NetParams g = obj.gradient(p);
  const auto fc = forward(arch, p, obj.input());
  const auto& hs = obj.input();

  for (int io = 0; io < 5; ++io) {
    const double db = g.layers[0].bias[io];
    for (std::size_t eta = 0; eta < hs.size(); ++eta) {
      const double lhs = g.layers[0].weights(io, static_cast<int>(eta));
      const double rhs = hs[eta] * db;
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
  }
  for (int nu = 0; nu < arch.output_dim(); ++nu) {
    const double dd = g.layers[1].bias[nu];
    for (int io = 0; io < 5; ++io) {
      const double lhs = g.layers[1].weights(nu, io);
      const double rhs = fc.post[0][io] * dd;
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
  }
}

TEST_CASE("finite differences recover the gradient of a quadratic") {
  struct Quadratic {
    double value(const NetParams& p) const { return 0.5 * param_dot(p, p); }
  };
  Architecture arch{1, 1, {}, Activation::Tanh};
  Rng rng(3);
  NetParams p = init_params(arch, 1, InitScheme::UniformFanIn);
  p.layers[0].bias[0] = rng.next_uniform(-2, 2);
  const NetParams fd = finite_difference_gradient(Quadratic{}, p, 1e-5);
  // gradient of ||theta||^2/2 is theta itself; central FD is exact on quadratics
  CHECK(std::fabs(fd.layers[0].weights(0, 0) - p.layers[0].weights(0, 0)) <= 1e-10);
  CHECK(std::fabs(fd.layers[0].bias[0] - p.layers[0].bias[0]) <= 1e-10);
}

TEST_CASE("reverse mode agrees with finite differences across the sweep") {
  const auto rep = gradcheck_fd(7, 1e-5, 1e-6, 1);
  for (const auto& c : rep.cases) {
    INFO(c.label << " err=" << c.error);
    CHECK(c.pass);
  }
}

TEST_CASE("finite-difference error decreases with step then plateaus") {
  Rng rng(44);
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  PhiObjective obj(sigma, arch, SmoothAbs(SmoothKind::LogCosh, 1e-3));
  const NetParams p = random_params(arch, rng);
  const NetParams g = obj.gradient(p);
  const double e3 = relative_l2_error(g, finite_difference_gradient(obj, p, 1e-3));
  const double e4 = relative_l2_error(g, finite_difference_gradient(obj, p, 1e-4));
  const double e5 = relative_l2_error(g, finite_difference_gradient(obj, p, 1e-5));
  CHECK(e4 < e3);
  CHECK(e5 < 1e-6);
}

TEST_CASE("decompose_from with zero parameters") {
  Rng rng(21);
  Architecture arch{4, 2, {3}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  const NetParams p = init_params(arch, 0, InitScheme::Zeros);
  const Decomposition d = decompose_from(p, sigma, arch);
  CHECK(frobenius(d.low_rank) == 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(d.sparse(i, j) == sigma(i, j));
}

TEST_CASE("decomposition low-rank part is PSD with rank at most k") {
  Rng rng(77);
  for (int t = 0; t < 15; ++t) {
    const int n = 3 + (t % 4);
    const int k = 1 + (t % 2);
    Architecture arch{n, k, {4}, Activation::Tanh};
    const SymMatrix sigma = random_sym(n, rng, 2.0);
    NetParams p = random_params(arch, rng, 1.0);
    scale_params(p, 2.0);
    const Decomposition d = decompose_from(p, sigma, arch);
    const double scale = std::max(frobenius(d.low_rank), 1e-30);
    CHECK(min_eigenvalue(d.low_rank) >= -1e-10 * scale);
    const auto dec = sym_eigen(d.low_rank);
    int above = 0;
    for (double lambda : dec.eigenvalues)
      if (lambda > 1e-10 * scale) ++above;
    CHECK(above <= k);
    // L + S reconstructs Sigma to fp-addition accuracy
    CHECK(frobenius(d.low_rank + d.sparse - sigma) <=
          1e-13 * (1.0 + frobenius(d.low_rank) + frobenius(sigma)));
  }
}
