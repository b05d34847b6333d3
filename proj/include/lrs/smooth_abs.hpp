#pragma once

#include <cmath>
#include <string>

#include "lrs/errors.hpp"

namespace lrs {

enum class SmoothKind { Huber, LogCosh };

/// Smooth surrogate for |t| with |mu'| <= 1 and mu'' <= 1/eps.
/// huber:   mu(t) = t^2/(2 eps) + eps/2 on |t| <= eps, |t| outside
/// logcosh: mu(t) = eps * ln(2 cosh(t / eps))
/// Both satisfy |t| <= mu(t) <= |t| + c*eps with c = 1/2 resp. ln 2.
struct SmoothAbs {
  SmoothKind kind = SmoothKind::Huber;
  double eps = 1e-4;

  SmoothAbs() = default;
  SmoothAbs(SmoothKind k, double e) : kind(k), eps(e) {
    if (!(eps > 0.0)) throw ConfigError("SmoothAbs: eps must be positive");
  }

  double value(double t) const {
    const double a = std::fabs(t);
    if (kind == SmoothKind::Huber) return a <= eps ? t * t / (2.0 * eps) + 0.5 * eps : a;
    // |t| + eps*log1p(e^{-2|t|/eps}), stable for large |t|/eps.
    return a + eps * std::log1p(std::exp(-2.0 * a / eps));
  }

  double derivative(double t) const {
    if (kind == SmoothKind::Huber) {
      if (std::fabs(t) <= eps) return t / eps;
      return t > 0.0 ? 1.0 : -1.0;
    }
    return std::tanh(t / eps);
  }

  double second_derivative_max() const { return 1.0 / eps; }

  /// c in the sandwich |t| <= mu(t) <= |t| + c*eps.
  double overshoot_constant() const {
    return kind == SmoothKind::Huber ? 0.5 : std::log(2.0);
  }
};

inline std::string to_string(SmoothKind k) {
  return k == SmoothKind::Huber ? "huber" : "logcosh";
}

inline SmoothKind parse_smooth_kind(const std::string& name) {
  if (name == "huber") return SmoothKind::Huber;
  if (name == "logcosh") return SmoothKind::LogCosh;
  throw ConfigError("unknown smoothing variant '" + name + "' (valid: huber, logcosh)");
}

}  // namespace lrs
