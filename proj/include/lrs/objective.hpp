#pragma once

#include <cmath>
#include <vector>

#include "lrs/matrix.hpp"
#include "lrs/network.hpp"
#include "lrs/smooth_abs.hpp"

namespace lrs {

/// Result bundle: factor M, low-rank part L = M M^T, sparse part S = Sigma - L.
struct Decomposition {
  DenseMatrix m;
  SymMatrix low_rank;
  SymMatrix sparse;
};

/// phi(Theta) = sum_{i,j} mu([g(N(h(Sigma))) g(N(h(Sigma)))^T - Sigma]_{i,j})
/// with its exact reverse-mode gradient. The input h(Sigma) is fixed, so it
/// is computed once at construction.
class PhiObjective {
 public:
  PhiObjective(SymMatrix sigma, Architecture arch, SmoothAbs mu)
      : sigma_(std::move(sigma)), arch_(std::move(arch)), mu_(mu) {
    arch_.validate();
    if (sigma_.dim() != arch_.n)
      throw DimensionError("PhiObjective: Sigma is " + std::to_string(sigma_.dim()) +
                           "x" + std::to_string(sigma_.dim()) + " but architecture has n=" +
                           std::to_string(arch_.n));
    hsig_ = half_vectorize(sigma_);
  }

  const SymMatrix& sigma() const { return sigma_; }
  const Architecture& arch() const { return arch_; }
  const SmoothAbs& mu() const { return mu_; }
  const std::vector<double>& input() const { return hsig_; }

  SymMatrix residual(const ForwardCache& fc) const {
    const DenseMatrix m = matricize(fc.output, arch_.n, arch_.k);
    return SymMatrix::from_factor(m) - sigma_;
  }

  double value(const NetParams& p) const {
    const ForwardCache fc = forward(arch_, p, hsig_);
    return value_from_cache(fc);
  }

  NetParams gradient(const NetParams& p) const {
    NetParams g;
    (void)value_and_gradient(p, g);
    return g;
  }

  double value_and_gradient(const NetParams& p, NetParams& grad) const {
    const ForwardCache fc = forward(arch_, p, hsig_);
    const int n = arch_.n, k = arch_.k, m = arch_.depth();
    const DenseMatrix mat = matricize(fc.output, n, k);
    const SymMatrix omega = SymMatrix::from_factor(mat) - sigma_;

    double phi = 0.0;
    for (double w : omega.data()) phi += mu_.value(w);

    // Adjoint of M in M M^T is (G + G^T) M = 2 G M with G = mu'(omega).
    std::vector<double> delta(static_cast<std::size_t>(n) * k, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double gij = mu_.derivative(omega(i, j));
        if (gij == 0.0) continue;
        for (int s = 0; s < k; ++s)
          delta[static_cast<std::size_t>(i) * k + s] += 2.0 * gij * mat(j, s);
      }

    grad = zeros_like(p);
    for (int u = m; u >= 0; --u) {
      const std::vector<double>& in = (u == 0) ? hsig_ : fc.post[u - 1];
      grad.layers[u].weights = outer(delta, in);
      grad.layers[u].bias = delta;
      if (u > 0) {
        std::vector<double> gamma = matvec_transposed(p.layers[u].weights, delta);
        for (std::size_t t = 0; t < gamma.size(); ++t)
          gamma[t] *= activation_eval(arch_.activation, fc.pre[u - 1][t]).first;
        delta = std::move(gamma);
      }
    }
    return phi;
  }

 private:
  double value_from_cache(const ForwardCache& fc) const {
    const SymMatrix omega = residual(fc);
    double phi = 0.0;
    for (double w : omega.data()) phi += mu_.value(w);
    return phi;
  }

  SymMatrix sigma_;
  Architecture arch_;
  SmoothAbs mu_;
  std::vector<double> hsig_;
};

inline double eval_phi(const NetParams& p, const SymMatrix& sigma, const Architecture& arch,
                       const SmoothAbs& mu) {
  return PhiObjective(sigma, arch, mu).value(p);
}

inline NetParams grad_phi(const NetParams& p, const SymMatrix& sigma, const Architecture& arch,
                          const SmoothAbs& mu) {
  return PhiObjective(sigma, arch, mu).gradient(p);
}

/// Central finite differences, component by component. Works for any
/// objective exposing value(NetParams); used as a verification oracle.
template <class Objective>
NetParams finite_difference_gradient(const Objective& obj, const NetParams& p, double step) {
  if (!(step > 0.0)) throw ConfigError("finite_difference_gradient: step must be positive");
  NetParams g = zeros_like(p);
  NetParams work = p;
  for (std::size_t u = 0; u < p.layers.size(); ++u) {
    auto& ww = work.layers[u].weights.data();
    auto& gw = g.layers[u].weights.data();
    for (std::size_t t = 0; t < ww.size(); ++t) {
      const double keep = ww[t];
      ww[t] = keep + step;
      const double fp = obj.value(work);
      ww[t] = keep - step;
      const double fm = obj.value(work);
      ww[t] = keep;
      gw[t] = (fp - fm) / (2.0 * step);
    }
    for (std::size_t t = 0; t < work.layers[u].bias.size(); ++t) {
      const double keep = work.layers[u].bias[t];
      work.layers[u].bias[t] = keep + step;
      const double fp = obj.value(work);
      work.layers[u].bias[t] = keep - step;
      const double fm = obj.value(work);
      work.layers[u].bias[t] = keep;
      g.layers[u].bias[t] = (fp - fm) / (2.0 * step);
    }
  }
  return g;
}

inline NetParams grad_phi_fd(const NetParams& p, const SymMatrix& sigma, const Architecture& arch,
                             const SmoothAbs& mu, double step) {
  return finite_difference_gradient(PhiObjective(sigma, arch, mu), p, step);
}

/// M = g(N(h(Sigma))), L = M M^T, S = Sigma - L.
inline Decomposition decompose_from(const NetParams& p, const SymMatrix& sigma,
                                    const Architecture& arch) {
  const ForwardCache fc = forward(arch, p, half_vectorize(sigma));
  Decomposition d;
  d.m = matricize(fc.output, arch.n, arch.k);
  d.low_rank = SymMatrix::from_factor(d.m);
  d.sparse = sigma - d.low_rank;
  return d;
}

}  // namespace lrs
