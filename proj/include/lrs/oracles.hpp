#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lrs/objective.hpp"
#include "lrs/optimizer.hpp"

namespace lrs {

/// Closed-form gradient of the single-hidden-layer objective, assembled
/// term by term from the per-coefficient partial-derivative formulas:
///   d/d b_i    = sum_{i,j} mu'(w_ij) sigma'(Z_i) sum_s (C_{(i-1)k+s,i} X_{(j-1)k+s}
///                 + X_{(i-1)k+s} C_{(j-1)k+s,i})
///   d/d A_ie   = h(Sigma)_e * d/d b_i
///   d/d d_nu   = 2 sum_j mu'(w_aj) X_{(j-1)k+b},  nu = (a-1)k + b
///   d/d C_nui  = Y_i * d/d d_nu
/// Independent of the reverse-mode path in PhiObjective; used to check it.
inline NetParams lemma_gradient_single_layer(const PhiObjective& obj, const NetParams& p) {
  const Architecture& arch = obj.arch();
  if (arch.depth() != 1)
    throw ConfigError("lemma_gradient_single_layer: needs exactly one hidden layer");
  const int n = arch.n, k = arch.k, ell = arch.hidden[0];
  const std::vector<double>& hs = obj.input();
  const ForwardCache fc = forward(arch, p, hs);
  const std::vector<double>& x = fc.output;
  const std::vector<double>& y = fc.post[0];
  const std::vector<double>& z = fc.pre[0];
  const DenseMatrix m = matricize(x, n, k);
  const SymMatrix omega = SymMatrix::from_factor(m) - obj.sigma();
  const DenseMatrix& c = p.layers[1].weights;

  NetParams g = zeros_like(p);
  for (int io = 0; io < ell; ++io) {
    const double sz = activation_eval(arch.activation, z[io]).first;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double inner = 0.0;
        for (int s = 0; s < k; ++s)
          inner += c(i * k + s, io) * x[j * k + s] + x[i * k + s] * c(j * k + s, io);
        acc += obj.mu().derivative(omega(i, j)) * sz * inner;
      }
    g.layers[0].bias[io] = acc;
    for (std::size_t eta = 0; eta < hs.size(); ++eta)
      g.layers[0].weights(io, static_cast<int>(eta)) = hs[eta] * acc;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < k; ++b) {
      const int nu = a * k + b;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += obj.mu().derivative(omega(a, j)) * x[j * k + b];
      acc *= 2.0;
      g.layers[1].bias[nu] = acc;
      for (int io = 0; io < ell; ++io) g.layers[1].weights(nu, io) = y[io] * acc;
    }
  return g;
}

inline double relative_l2_error(const NetParams& a, const NetParams& b) {
  NetParams diff = a;
  add_scaled(diff, b, -1.0);
  const double ref = std::max(param_norm(a), param_norm(b));
  if (ref == 0.0) return 0.0;
  return param_norm(diff) / ref;
}

// ---- verification suites (wrapped by the gradcheck CLI) ---------------------

struct GradCheckCase {
  std::string label;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  bool all_pass = true;

  void add(std::string label, double error, double tol) {
    cases.push_back({std::move(label), error, tol, error <= tol});
    all_pass = all_pass && cases.back().pass;
  }
};

namespace detail {
inline SymMatrix random_sym(int n, Rng& rng, double scale = 1.0) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, rng.next_uniform(-scale, scale));
  return s;
}

inline NetParams random_params(const Architecture& arch, Rng& rng, double scale = 0.5) {
  NetParams p = init_params(arch, rng.next_u64(), InitScheme::UniformFanIn);
  for (auto& l : p.layers)
    for (auto& b : l.bias) b = rng.next_uniform(-scale, scale);
  return p;
}
}  // namespace detail

/// Reverse-mode gradient vs central finite differences over a sweep of
/// depths, widths, smoothing variants, and activations. `corrupt` is a
/// negative-control hook that perturbs one gradient component.
inline GradCheckReport gradcheck_fd(std::uint64_t seed, double step = 1e-5, double tol = 1e-6,
                                    int instances_per_combo = 2, bool corrupt = false) {
  GradCheckReport rep;
  Rng rng(seed);
  const SmoothKind smooths[] = {SmoothKind::Huber, SmoothKind::LogCosh};
  const Activation acts[] = {Activation::Tanh, Activation::ScaledArctan,
                             Activation::LogisticRescaled};
  const std::vector<std::vector<int>> depths = {{}, {5}, {6, 4}};
  int idx = 0;
  for (SmoothKind sk : smooths)
    for (Activation act : acts)
      for (const auto& hidden : depths)
        for (int rep_i = 0; rep_i < instances_per_combo; ++rep_i) {
          const int n = 3 + (idx % 4);
          const int k = 1 + (idx % 2);
          ++idx;
          Architecture arch{n, k, hidden, act};
          const SymMatrix sigma = detail::random_sym(n, rng);
          PhiObjective obj(sigma, arch, SmoothAbs(sk, sk == SmoothKind::Huber ? 1e-4 : 1e-3));
          NetParams p = detail::random_params(arch, rng);
          NetParams g = obj.gradient(p);
          if (corrupt) g.layers[0].bias[0] += 1e-3 * (1.0 + std::fabs(g.layers[0].bias[0]));
          const NetParams fd = finite_difference_gradient(obj, p, step);
          rep.add("fd n=" + std::to_string(n) + " k=" + std::to_string(k) + " m=" +
                      std::to_string(hidden.size()) + " " + to_string(sk) + " " + to_string(act),
                  relative_l2_error(g, fd), tol);
        }
  return rep;
}

/// Reverse-mode gradient vs the Lemma closed forms on single-hidden-layer
/// instances.
inline GradCheckReport gradcheck_lemma(std::uint64_t seed, int instances = 20, double tol = 1e-12,
                                       bool corrupt = false) {
  GradCheckReport rep;
  Rng rng(seed);
  for (int t = 0; t < instances; ++t) {
    const int n = 3 + (t % 4);
    const int k = 1 + (t % 2);
    const int ell = 3 + (t % 5);
    Architecture arch{n, k, {ell}, t % 2 ? Activation::Tanh : Activation::ScaledArctan};
    const SymMatrix sigma = detail::random_sym(n, rng);
    PhiObjective obj(sigma, arch,
                     SmoothAbs(t % 2 ? SmoothKind::Huber : SmoothKind::LogCosh, 1e-3));
    NetParams p = detail::random_params(arch, rng);
    NetParams g = obj.gradient(p);
    if (corrupt) g.layers[1].bias[0] += 1e-6 * (1.0 + std::fabs(g.layers[1].bias[0]));
    rep.add("lemma n=" + std::to_string(n) + " k=" + std::to_string(k) + " ell=" +
                std::to_string(ell),
            relative_l2_error(g, lemma_gradient_single_layer(obj, p)), tol);
  }
  return rep;
}

/// |t| <= phi <= |t| + n^2 c eps sandwich on random instances.
inline GradCheckReport gradcheck_sandwich(std::uint64_t seed, int instances = 20) {
  GradCheckReport rep;
  Rng rng(seed);
  for (int t = 0; t < instances; ++t) {
    const int n = 2 + (t % 5);
    const int k = 1 + (t % 2);
    const SmoothAbs mu(t % 2 ? SmoothKind::Huber : SmoothKind::LogCosh, 1e-4);
    Architecture arch{n, k, {4}, Activation::Tanh};
    const SymMatrix sigma = detail::random_sym(n, rng);
    PhiObjective obj(sigma, arch, mu);
    NetParams p = detail::random_params(arch, rng);
    const double phi = obj.value(p);
    const Decomposition dec = decompose_from(p, sigma, arch);
    const double l1 = l1_entrywise(dec.sparse);
    const double gap = n * n * mu.overshoot_constant() * mu.eps;
    const double viol = std::max(l1 - phi, phi - (l1 + gap));
    rep.add("sandwich n=" + std::to_string(n) + " " + to_string(mu.kind), viol, 1e-12);
  }
  return rep;
}

}  // namespace lrs
