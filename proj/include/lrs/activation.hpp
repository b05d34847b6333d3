#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "lrs/errors.hpp"

namespace lrs {

/// Bounded smooth activations with range inside [-1, 1].
enum class Activation { Tanh, ScaledArctan, LogisticRescaled };

struct ActivationValue {
  double value;
  double first;
  double second;
};

/// sigma(t), sigma'(t), sigma''(t).
inline ActivationValue activation_eval(Activation kind, double t) {
  switch (kind) {
    case Activation::Tanh: {
      const double y = std::tanh(t);
      const double d1 = 1.0 - y * y;
      return {y, d1, -2.0 * y * d1};
    }
    case Activation::ScaledArctan: {
      const double c = 2.0 / std::numbers::pi;
      const double den = 1.0 + t * t;
      return {c * std::atan(t), c / den, -2.0 * c * t / (den * den)};
    }
    case Activation::LogisticRescaled: {
      // 2/(1+e^{-t}) - 1 == tanh(t/2), range (-1, 1).
      const double y = std::tanh(0.5 * t);
      const double d1 = 0.5 * (1.0 - y * y);
      return {y, d1, -y * d1};
    }
  }
  throw ConfigError("activation_eval: unknown activation kind");
}

/// Uniform bound on |sigma'|.
inline double sigma_prime_max(Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return 1.0;
    case Activation::ScaledArctan:
      return 2.0 / std::numbers::pi;
    case Activation::LogisticRescaled:
      return 0.5;
  }
  throw ConfigError("sigma_prime_max: unknown activation kind");
}

/// Uniform bound on |sigma''|.
inline double sigma_second_max(Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return 4.0 / (3.0 * std::sqrt(3.0));
    case Activation::ScaledArctan:
      return 3.0 * std::sqrt(3.0) / (4.0 * std::numbers::pi);
    case Activation::LogisticRescaled:
      return 1.0 / (3.0 * std::sqrt(3.0));
  }
  throw ConfigError("sigma_second_max: unknown activation kind");
}

inline std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::Tanh:
      return "tanh";
    case Activation::ScaledArctan:
      return "scaled-arctan";
    case Activation::LogisticRescaled:
      return "logistic-rescaled";
  }
  return "?";
}

inline Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "scaled-arctan") return Activation::ScaledArctan;
  if (name == "logistic-rescaled") return Activation::LogisticRescaled;
  throw ConfigError("unknown activation '" + name +
                    "' (valid: tanh, scaled-arctan, logistic-rescaled)");
}

}  // namespace lrs
