#include <catch2/catch_amalgamated.hpp>

#include "lrs/bounds.hpp"
#include "lrs/objective.hpp"
#include "lrs/optimizer.hpp"
#include "lrs/oracles.hpp"
#include "lrs/synth.hpp"

using namespace lrs;

namespace {
SymMatrix random_sym(int n, Rng& rng, double scale = 1.0) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, rng.next_uniform(-scale, scale));
  return s;
}

/// Uniform-in-direction point with norm U * d inside the D-ball.
NetParams ball_point(const Architecture& arch, double d_radius, Rng& rng) {
  NetParams p = init_params(arch, rng.next_u64(), InitScheme::Zeros);
  for (auto& l : p.layers) {
    for (auto& w : l.weights.data()) w = rng.next_gaussian();
    for (auto& b : l.bias) b = rng.next_gaussian();
  }
  const double norm = param_norm(p);
  if (norm > 0.0) scale_params(p, d_radius * rng.next_unit() / norm);
  return p;
}

SmoothnessInputs inputs_for(const Architecture& arch, const SmoothAbs& mu,
                            const SymMatrix& sigma, double d_radius) {
  return SmoothnessInputs::from(arch, mu, sigma, d_radius);
}

double block_b_distance(const NetParams& a, const NetParams& b) {
  double acc = 0.0;
  for (std::size_t t = 0; t < a.layers[0].bias.size(); ++t) {
    const double d = a.layers[0].bias[t] - b.layers[0].bias[t];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double block_d_distance(const NetParams& a, const NetParams& b) {
  double acc = 0.0;
  for (std::size_t t = 0; t < a.layers[1].bias.size(); ++t) {
    const double d = a.layers[1].bias[t] - b.layers[1].bias[t];
    acc += d * d;
  }
  return std::sqrt(acc);
}
}  // namespace

TEST_CASE("bounds are monotone in D and in L_Z") {
  Rng rng(3);
  const SymMatrix zero(4);
  const SymMatrix eye = SymMatrix::identity(4);
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);

  for (double d : {0.5, 1.0, 2.0, 7.0}) {
    const auto lo = inputs_for(arch, mu, zero, d);
    const auto hi = inputs_for(arch, mu, zero, 2.0 * d);
    CHECK(lipschitz_b(hi) >= lipschitz_b(lo));
    CHECK(lipschitz_d(hi) >= lipschitz_d(lo));
    CHECK(lipschitz_single(hi) >= lipschitz_single(lo));
    CHECK(lipschitz_multi(hi) >= lipschitz_multi(lo));

    const auto with_sigma = inputs_for(arch, mu, eye, d);
    CHECK(lipschitz_b(with_sigma) >= lipschitz_b(lo));
    CHECK(lipschitz_d(with_sigma) >= lipschitz_d(lo));
    CHECK(lipschitz_single(with_sigma) >= lipschitz_single(lo));
    CHECK(lipschitz_multi(with_sigma) >= lipschitz_multi(lo));
  }
}

TEST_CASE("bounds are monotone over an input lattice") {
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);
  auto value = [&](int n, int k, int ell, double d, double signorm) {
    SmoothnessInputs in;
    in.n = n;
    in.k = k;
    in.hidden = {ell};
    in.d_radius = d;
    in.sigma_s_norm = signorm;
    in.sigma_prime = 1.0;
    in.sigma_second = sigma_second_max(Activation::Tanh);
    in.mu_second = mu.second_derivative_max();
    return std::tuple{lipschitz_b(in), lipschitz_d(in), lipschitz_multi(in)};
  };
  for (int n : {2, 4})
    for (int k : {1, 2})
      for (int ell : {2, 5})
        for (double d : {1.0, 3.0})
          for (double s : {0.0, 2.0}) {
            auto [b0, d0, m0] = value(n, k, ell, d, s);
            auto [b1, d1, m1] = value(n + 1, k, ell, d, s);
            CHECK(b1 >= b0);
            CHECK(d1 >= d0);
            CHECK(m1 >= m0);
            auto [b2, d2, m2] = value(n, k, ell + 1, d, s);
            CHECK(b2 >= b0);
            CHECK(d2 >= d0);
            CHECK(m2 >= m0);
            auto [b3, d3, m3] = value(n, k + 1, ell, d, s);
            CHECK(d3 >= d0);
            CHECK(m3 >= m0);
          }
}

TEST_CASE("single-layer combination identity") {
  Rng rng(5);
  Architecture arch{4, 2, {5}, Activation::ScaledArctan};
  const SymMatrix sigma = random_sym(4, rng);
  const auto in = inputs_for(arch, SmoothAbs(SmoothKind::Huber, 1e-2), sigma, 2.0);
  const double lb = lipschitz_b(in), ld = lipschitz_d(in), ls = lipschitz_single(in);
  const double s2 = in.sigma_s_norm * in.sigma_s_norm;
  CHECK(ls * ls == Catch::Approx(lb * lb * (1.0 + s2) + ld * ld * 6.0).epsilon(1e-14));
}

TEST_CASE("empirical gradient variation never exceeds the computed bounds") {
  Rng rng(7);
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);
  const double d_radius = 2.0;
  PhiObjective obj(sigma, arch, mu);
  const auto in = inputs_for(arch, mu, sigma, d_radius);
  const double lb = lipschitz_b(in);
  const double ld = lipschitz_d(in);
  const double ls = lipschitz_single(in);
  const double lm = lipschitz_multi(in);

  for (int t = 0; t < 200; ++t) {
    const NetParams x = ball_point(arch, d_radius, rng);
    const NetParams y = ball_point(arch, d_radius, rng);
    NetParams step = x;
    add_scaled(step, y, -1.0);
    const double dist = param_norm(step);
    if (dist < 1e-12) continue;
    const NetParams gx = obj.gradient(x);
    const NetParams gy = obj.gradient(y);
    CHECK(block_b_distance(gx, gy) <= lb * dist);
    CHECK(block_d_distance(gx, gy) <= ld * dist);
    NetParams diff = gx;
    add_scaled(diff, gy, -1.0);
    CHECK(param_norm(diff) <= ls * dist);
    CHECK(param_norm(diff) <= lm * dist);
  }
}

TEST_CASE("two-hidden-layer bound dominates empirically") {
  Rng rng(15);
  Architecture arch{4, 2, {5, 4}, Activation::Tanh};
  const SymMatrix sigma = random_sym(4, rng);
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);
  const double d_radius = 2.0;
  PhiObjective obj(sigma, arch, mu);
  const double lm = lipschitz_multi(inputs_for(arch, mu, sigma, d_radius));
  for (int t = 0; t < 200; ++t) {
    const NetParams x = ball_point(arch, d_radius, rng);
    const NetParams y = ball_point(arch, d_radius, rng);
    NetParams step = x;
    add_scaled(step, y, -1.0);
    const double dist = param_norm(step);
    if (dist < 1e-12) continue;
    NetParams diff = obj.gradient(x);
    add_scaled(diff, obj.gradient(y), -1.0);
    CHECK(param_norm(diff) <= lm * dist);
  }
}

TEST_CASE("single-layer route and recursion route agree within a factor of ten") {
  Rng rng(19);
  Architecture arch{4, 2, {4}, Activation::Tanh};
  SymMatrix sigma(4);
  for (int i = 0; i < 4; ++i) sigma.set(i, i, 0.5);
  const auto in = inputs_for(arch, SmoothAbs(SmoothKind::Huber, 1.0), sigma, 1.0);
  const double ls = lipschitz_single(in);
  const double lm = lipschitz_multi(in);
  const double ratio = std::max(ls / lm, lm / ls);
  CHECK(ratio <= 10.0);
}

TEST_CASE("single-layer bound grows like D^4") {
  Architecture arch{4, 2, {5}, Activation::Tanh};
  SymMatrix sigma = SymMatrix::identity(4);
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);
  for (double d : {1e3, 1e4}) {
    const double b1 = lipschitz_single(inputs_for(arch, mu, sigma, d));
    const double b2 = lipschitz_single(inputs_for(arch, mu, sigma, 2.0 * d));
    CHECK(b2 / b1 == Catch::Approx(16.0).epsilon(0.10));
  }
}

TEST_CASE("recursion bound grows like D^(2m+2)") {
  const SmoothAbs mu(SmoothKind::Huber, 1e-2);
  SymMatrix sigma = SymMatrix::identity(4);
  for (int m : {1, 2}) {
    std::vector<int> hidden(m, 5);
    Architecture arch{4, 2, hidden, Activation::Tanh};
    const double d = 1e4;
    const double b1 = lipschitz_multi(inputs_for(arch, mu, sigma, d));
    const double b2 = lipschitz_multi(inputs_for(arch, mu, sigma, 2.0 * d));
    const double expect = std::pow(2.0, 2.0 * m + 2.0);
    CHECK(b2 / b1 == Catch::Approx(expect).epsilon(0.10));
  }
}

TEST_CASE("recursion bound rejects depth zero") {
  SmoothnessInputs in;
  in.n = 3;
  in.k = 1;
  in.d_radius = 1.0;
  CHECK_THROWS_AS(lipschitz_multi(in), ConfigError);
}

TEST_CASE("iteration certificate plug-ins") {
  CHECK(iteration_certificate(1.0, 1.0, 1.0, 1.0) == 0);
  // halving eps quadruples N + 1 (up to rounding)
  const long n1 = iteration_certificate(50.0, 0.5, 2.0, 0.1);
  const long n2 = iteration_certificate(50.0, 0.5, 2.0, 0.05);
  CHECK(std::llabs((n2 + 1) - 4 * (n1 + 1)) <= 3);
  CHECK_THROWS_AS(iteration_certificate(0.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("certificate inequality holds on a real armijo trace") {
  const SynthInstance inst = gen_instance(8, 2, 0.9, 5);
  Architecture arch{8, 2, {6}, Activation::Tanh};
  const SmoothAbs mu(SmoothKind::Huber, 1e-4);
  GdOptions opt;
  opt.step = StepRule::goldstein_armijo(0.1, 0.9);
  opt.stop.max_iters = 200;
  opt.stop.grad_tol = 0.0;
  const auto res = run(inst.sigma, arch, mu, InitScheme::UniformFanIn, opt, 23);

  const double d_radius = 1.05 * res.trace.running_max_norm();
  const double lip = lipschitz_multi(inputs_for(arch, mu, inst.sigma, d_radius));
  const double k_const = opt.step.certificate_k();
  for (long n : {50L, 200L}) {
    const double lhs = res.trace.min_grad_norm_up_to(n);
    const double rhs = certificate_grad_bound(lip, k_const, res.trace.initial_phi(), n);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("order forms scale but are labeled unsound") {
  Architecture arch{4, 2, {5}, Activation::Tanh};
  const auto in = inputs_for(arch, SmoothAbs(SmoothKind::Huber, 1e-2),
                             SymMatrix::identity(4), 2.0);
  const auto rep = smoothness_report(in);
  CHECK(rep.single_layer_forms);
  CHECK(rep.order_b > 0.0);
  CHECK(rep.order_d > 0.0);
  CHECK(rep.order_multi > 0.0);
  CHECK(rep.lip_single > 0.0);
  CHECK(rep.lip_multi > 0.0);
}
