#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lrs/activation.hpp"
#include "lrs/errors.hpp"
#include "lrs/matrix.hpp"
#include "lrs/network.hpp"
#include "lrs/smooth_abs.hpp"

namespace lrs {

/// Inputs for the gradient-smoothness bounds: dimensions, hidden widths,
/// the parameter-ball radius D, ||Sigma||_S, and the derivative bounds of
/// the activation and the smoothing function.
struct SmoothnessInputs {
  int n = 0;
  int k = 0;
  std::vector<int> hidden;
  double d_radius = 1.0;
  double sigma_s_norm = 0.0;
  double sigma_prime = 1.0;
  double sigma_second = 0.0;
  double mu_second = 0.0;

  double lz_sq() const { return 1.0 + sigma_s_norm * sigma_s_norm; }
  double lz() const { return std::sqrt(lz_sq()); }

  static SmoothnessInputs from(const Architecture& arch, const SmoothAbs& mu,
                               const SymMatrix& sigma, double d_radius) {
    SmoothnessInputs in;
    in.n = arch.n;
    in.k = arch.k;
    in.hidden = arch.hidden;
    in.d_radius = d_radius;
    in.sigma_s_norm = sym_norm(sigma);
    in.sigma_prime = sigma_prime_max(arch.activation);
    in.sigma_second = sigma_second_max(arch.activation);
    in.mu_second = mu.second_derivative_max();
    return in;
  }

  void validate() const {
    if (n < 1 || k < 1) throw ConfigError("SmoothnessInputs: need n, k >= 1");
    if (!(d_radius > 0.0)) throw ConfigError("SmoothnessInputs: D must be positive");
    for (int h : hidden)
      if (h < 1) throw ConfigError("SmoothnessInputs: hidden widths must be positive");
  }
};

/// Smoothness constant of the partial gradient w.r.t. the input bias of a
/// single hidden layer of width l. Explicit form of the final inequality
/// of the corresponding lemma (sum instead of max, all derivative-bound
/// factors kept), evaluated at ||Theta|| = D:
///   L_b^2 = 24 n^2 D^2 [ (l+1)(sig'' L_Z)^2 D^2
///                       + 4 (l+1)^2 (mu'' L_Z)^2 sig'^4 D^6
///                       + 4 (l+1)^3 (sig' mu'')^2 D^4
///                       + D^2 sig'^4 L_Z^2
///                       + (n+1)(l+1) sig'^2 ]
inline double lipschitz_b(const SmoothnessInputs& in) {
  in.validate();
  if (in.hidden.size() != 1)
    throw ConfigError("lipschitz_b: defined for exactly one hidden layer");
  const double n = in.n, ell = in.hidden[0], d = in.d_radius;
  const double lz2 = in.lz_sq();
  const double sp2 = in.sigma_prime * in.sigma_prime;
  const double sp4 = sp2 * sp2;
  const double ss2 = in.sigma_second * in.sigma_second;
  const double ms2 = in.mu_second * in.mu_second;
  const double lp1 = ell + 1.0;
  const double d2 = d * d;
  const double inner = lp1 * ss2 * lz2 * d2 + 4.0 * lp1 * lp1 * ms2 * lz2 * sp4 * d2 * d2 * d2 +
                       4.0 * lp1 * lp1 * lp1 * sp2 * ms2 * d2 * d2 + d2 * sp4 * lz2 +
                       (n + 1.0) * lp1 * sp2;
  return std::sqrt(24.0 * n * n * d2 * inner);
}

/// Same for the output bias:
///   L_d^2 = 8 n^2 ((sig' D L_Z)^2 + n k (l+1))
///         + 16 n (l+1)^2 mu''^2 (2 (sig' L_Z)^2 D^6 + (n+1) D^4 (l+1))
inline double lipschitz_d(const SmoothnessInputs& in) {
  in.validate();
  if (in.hidden.size() != 1)
    throw ConfigError("lipschitz_d: defined for exactly one hidden layer");
  const double n = in.n, k = in.k, ell = in.hidden[0], d = in.d_radius;
  const double lz2 = in.lz_sq();
  const double sp2 = in.sigma_prime * in.sigma_prime;
  const double ms2 = in.mu_second * in.mu_second;
  const double lp1 = ell + 1.0;
  const double d2 = d * d, d4 = d2 * d2, d6 = d4 * d2;
  const double first = 8.0 * n * n * (sp2 * d2 * lz2 + n * k * lp1);
  const double second = 16.0 * n * lp1 * lp1 * ms2 * (2.0 * sp2 * lz2 * d6 + (n + 1.0) * d4 * lp1);
  return std::sqrt(first + second);
}

/// Combined single-hidden-layer smoothness constant:
///   L^2 = L_b^2 (1 + ||Sigma||_S^2) + L_d^2 (1 + l)
inline double lipschitz_single(const SmoothnessInputs& in) {
  if (in.hidden.size() != 1)
    throw ConfigError("lipschitz_single: defined for exactly one hidden layer");
  const double lb = lipschitz_b(in);
  const double ld = lipschitz_d(in);
  const double s2 = in.sigma_s_norm * in.sigma_s_norm;
  return std::sqrt(lb * lb * (1.0 + s2) + ld * ld * (1.0 + in.hidden[0]));
}

/// General m >= 1 smoothness constant from the layer recursion:
///   calL_0^2 = 1 + ||Sigma||_S^2,  calL_u^2 = D+^2 calL_{u-1}^2 + l_u + 1,
///   D+ = max(D sig', 1.001),  L_F = 2 sqrt(n) D,  L_F' = 2n(1 + mu'' D^2),
/// per-layer constants
///   sum_i (L_i^(u))^2 <= D^{2(m-u)} sig'^{2(m-u-2)}
///                        (L_F' calL_m sig' + L_F sig'' sum_{c=u}^{m-1} calL_c)^2
/// for u < m, and L_i^(m) = L_F' on the n k output biases; aggregate
///   L^2 = sum_u (1 + l~_u) sum_i (L_i^(u))^2
/// with l~_0 = ||Sigma||_S^2 and l~_u = l_u for u >= 1.
inline double lipschitz_multi(const SmoothnessInputs& in) {
  in.validate();
  const int m = static_cast<int>(in.hidden.size());
  if (m < 1) throw ConfigError("lipschitz_multi: needs at least one hidden layer (m >= 1)");
  const double n = in.n, k = in.k, d = in.d_radius;
  const double dplus = std::max(d * in.sigma_prime, 1.001);
  std::vector<double> cal(m + 1);  // calL_u
  cal[0] = in.lz();
  for (int u = 1; u <= m; ++u)
    cal[u] = std::sqrt(dplus * dplus * cal[u - 1] * cal[u - 1] + in.hidden[u - 1] + 1.0);
  const double lf = 2.0 * std::sqrt(n) * d;
  const double lfp = 2.0 * n * (1.0 + in.mu_second * d * d);

  double total = 0.0;
  for (int u = 0; u < m; ++u) {
    double tail = 0.0;
    for (int c = u; c <= m - 1; ++c) tail += cal[c];
    const double core = lfp * cal[m] * in.sigma_prime + lf * in.sigma_second * tail;
    const double dpow = std::pow(d, 2.0 * (m - u));
    const double spow = std::pow(in.sigma_prime, 2.0 * (m - u - 2));
    const double ltilde = (u == 0) ? in.sigma_s_norm * in.sigma_s_norm
                                   : static_cast<double>(in.hidden[u - 1]);
    total += (1.0 + ltilde) * dpow * spow * core * core;
  }
  total += (1.0 + in.hidden[m - 1]) * n * k * lfp * lfp;
  return std::sqrt(total);
}

// ---- order forms (constant = 1): for scaling studies only, not sound ------

inline double order_form_b(const SmoothnessInputs& in) {
  const double n = in.n, ell = in.hidden.empty() ? 1.0 : in.hidden[0], d = in.d_radius;
  const double lz2 = in.lz_sq();
  const double d2 = d * d;
  const double mx = std::max(std::max(ell * d2 * lz2, ell * ell * d2 * d2 * d2 * lz2),
                             std::max(ell * ell * ell * d2 * d2, n * ell));
  return std::sqrt(n * n * d2 * mx);
}

inline double order_form_d(const SmoothnessInputs& in) {
  const double n = in.n, k = in.k, ell = in.hidden.empty() ? 1.0 : in.hidden[0], d = in.d_radius;
  const double lz2 = in.lz_sq();
  const double d2 = d * d, d4 = d2 * d2, d6 = d4 * d2;
  const double mx = std::max(std::max(n * n * d2 * lz2, n * n * n * k * ell),
                             std::max(n * ell * ell * d6 * lz2, n * n * ell * ell * ell * d4));
  return std::sqrt(mx);
}

/// Order form of the general theorem bound, reading the ambiguous nesting
/// as max{ k n^3 D^4 l_max, n D^{4m+2} max{l_max, L_Z^2} * n D^2 max{L_Z^2, l_max} }.
inline double order_form_multi(const SmoothnessInputs& in) {
  const int m = static_cast<int>(in.hidden.size());
  const double n = in.n, k = in.k, d = in.d_radius;
  double lmax = 1.0;
  for (int h : in.hidden) lmax = std::max(lmax, static_cast<double>(h));
  const double lz2 = in.lz_sq();
  const double d2 = d * d;
  const double a = k * n * n * n * d2 * d2 * lmax;
  const double b = n * std::pow(d, 4.0 * m + 2.0) * std::max(lmax, lz2) * n * d2 *
                   std::max(lz2, lmax);
  return std::sqrt(std::max(a, b));
}

/// Everything the `bounds` CLI reports.
struct SmoothnessReport {
  double lip_b = 0.0;
  double lip_d = 0.0;
  double lip_single = 0.0;   // 0 when m != 1
  double lip_multi = 0.0;
  double order_b = 0.0;
  double order_d = 0.0;
  double order_multi = 0.0;
  bool single_layer_forms = false;  // whether the m == 1 forms were produced
};

inline SmoothnessReport smoothness_report(const SmoothnessInputs& in) {
  SmoothnessReport rep;
  rep.lip_multi = lipschitz_multi(in);
  rep.order_multi = order_form_multi(in);
  if (in.hidden.size() == 1) {
    rep.single_layer_forms = true;
    rep.lip_b = lipschitz_b(in);
    rep.lip_d = lipschitz_d(in);
    rep.lip_single = lipschitz_single(in);
    rep.order_b = order_form_b(in);
    rep.order_d = order_form_d(in);
  }
  return rep;
}

/// Smallest N with N + 1 >= L * phi0 / (K eps^2); with that many steps a
/// scheme satisfying the descent condition reaches min_j ||grad|| <= eps.
inline long iteration_certificate(double lipschitz, double k_constant, double phi0, double eps) {
  if (!(lipschitz > 0.0) || !(k_constant > 0.0) || !(phi0 > 0.0) || !(eps > 0.0))
    throw ConfigError("iteration_certificate: all inputs must be positive");
  const double x = lipschitz * phi0 / (k_constant * eps * eps);
  const double n = std::ceil(x) - 1.0;
  return n < 0.0 ? 0 : static_cast<long>(n);
}

/// Certificate right-hand side: sqrt(L * phi0 / (K (N + 1))).
inline double certificate_grad_bound(double lipschitz, double k_constant, double phi0, long n) {
  return std::sqrt(lipschitz * phi0 / (k_constant * (static_cast<double>(n) + 1.0)));
}

}  // namespace lrs
