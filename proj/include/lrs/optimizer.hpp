#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lrs/errors.hpp"
#include "lrs/network.hpp"
#include "lrs/objective.hpp"

namespace lrs {

/// Step-size strategies. constant and inv-sqrt are predetermined
/// (condition (phi_j - phi_{j+1}) >= (K/L)||grad||^2 holds with K = 1);
/// goldstein-armijo self-tunes and certifies K = 2 alpha (1 - beta).
struct StepRule {
  enum class Kind { Constant, InvSqrt, GoldsteinArmijo };
  Kind kind = Kind::GoldsteinArmijo;
  double h = 1.0;  // constant step, inv-sqrt numerator, or initial armijo trial
  double alpha = 0.1;
  double beta = 0.9;
  int max_bisections = 60;

  static StepRule constant(double step) { return {Kind::Constant, step, 0, 0, 0}; }
  static StepRule inv_sqrt(double step) { return {Kind::InvSqrt, step, 0, 0, 0}; }
  static StepRule goldstein_armijo(double a = 0.1, double b = 0.9, int bisections = 60,
                                   double trial = 1.0) {
    return {Kind::GoldsteinArmijo, trial, a, b, bisections};
  }

  double certificate_k() const {
    return kind == Kind::GoldsteinArmijo ? 2.0 * alpha * (1.0 - beta) : 1.0;
  }

  void validate() const {
    if (!(h > 0.0)) throw ConfigError("StepRule: step/trial must be positive");
    if (kind == Kind::GoldsteinArmijo) {
      if (!(0.0 < alpha && alpha < beta && beta < 1.0))
        throw ConfigError("StepRule: goldstein-armijo needs 0 < alpha < beta < 1");
      if (max_bisections < 1) throw ConfigError("StepRule: max_bisections must be >= 1");
    }
  }
};

struct StopRule {
  long max_iters = 20000;
  double grad_tol = 0.0;
  struct Plateau {
    int window = 0;
    double min_rel_decrease = 0.0;
  };
  std::optional<Plateau> plateau;

  void validate() const {
    if (max_iters < 0 || (max_iters == 0 && grad_tol <= 0.0 && !plateau))
      throw ConfigError("StopRule: at least one of max_iters/grad_tol must be active");
  }
};

enum class StopReason { GradTol, MaxIters, Plateau, NumericalFloor };

struct TraceRecord {
  long iter;
  double phi;
  double grad_norm;
  double step;  // step taken from this iterate; 0 on the terminal record
  double running_max_param_norm;
};

struct OptTrace {
  std::vector<TraceRecord> records;
  StopReason reason = StopReason::MaxIters;
  double wall_seconds = 0.0;
  // filled when GdOptions.d_ball is set: iterates with ||Theta_j|| > D
  long d_ball_violations = 0;

  double final_phi() const { return records.back().phi; }
  double initial_phi() const { return records.front().phi; }
  double running_max_norm() const { return records.back().running_max_param_norm; }

  double min_grad_norm_up_to(long n) const {
    double m = records.front().grad_norm;
    for (const auto& r : records) {
      if (r.iter > n) break;
      m = std::min(m, r.grad_norm);
    }
    return m;
  }
};

/// Optimizer failure carrying the partial trace and the last valid iterate.
class OptFailure : public NumericalError {
 public:
  OptFailure(const std::string& what, OptTrace trace, NetParams last)
      : NumericalError(what), trace(std::move(trace)), last_params(std::move(last)) {}
  OptTrace trace;
  NetParams last_params;
};

class StepSearchError : public OptFailure {
  using OptFailure::OptFailure;
};

class DivergenceError : public OptFailure {
  using OptFailure::OptFailure;
};

struct GdOptions {
  StepRule step;
  StopRule stop;
  // Heavy-ball first-moment variant; outside the hypotheses of the
  // descent-condition analysis, offered for experimentation only.
  bool momentum = false;
  double momentum_coef = 0.9;
  // The iterates are never projected onto the ball ||Theta|| <= D; when a
  // D is supplied the trace counts the iterates that leave it.
  std::optional<double> d_ball;
};

namespace detail {

/// Goldstein-Armijo search along -grad. Accepts h with
/// alpha * h * ||g||^2 <= phi(T) - phi(T - h g) <= beta * h * ||g||^2.
/// Doubles while the decrease ratio stays above beta, halves while below
/// alpha, then bisects the bracket. Returns 0 when the required decrease
/// h * ||g||^2 falls below the floating-point resolution of phi: at that
/// point the iterate is stationary at machine precision and the caller
/// should stop rather than search noise.
template <class Objective>
double armijo_step(const Objective& obj, const NetParams& theta, double phi0,
                   const NetParams& grad, double grad_sq, const StepRule& rule, double trial,
                   const OptTrace& trace_so_far) {
  const double noise_floor =
      16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(phi0), 1e-300);
  if (grad_sq <= 0.0) return 0.0;

  auto ratio_at = [&](double h) {
    NetParams cand = theta;
    add_scaled(cand, grad, -h);
    const double v = obj.value(cand);
    if (!std::isfinite(v)) return -std::numeric_limits<double>::infinity();
    return (phi0 - v) / (h * grad_sq);
  };

  const double a = rule.alpha, b = rule.beta;
  double h = trial;
  double r = ratio_at(h);
  if (r >= a && r <= b) return h;

  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  const int growth_cap = 64;
  if (r > b) {  // step too small: grow
    for (int it = 0; it < growth_cap; ++it) {
      lo = h;
      h *= 2.0;
      r = ratio_at(h);
      if (r >= a && r <= b) return h;
      if (r < a) {
        hi = h;
        bracketed = true;
        break;
      }
    }
  } else {  // step too large (or non-finite trial): shrink
    for (int it = 0; it < growth_cap; ++it) {
      hi = h;
      h *= 0.5;
      if (h * grad_sq < noise_floor) return 0.0;
      r = ratio_at(h);
      if (r >= a && r <= b) return h;
      if (r > b) {
        lo = h;
        bracketed = true;
        break;
      }
    }
  }
  if (bracketed) {
    if (hi * grad_sq < noise_floor) return 0.0;
    for (int it = 0; it < rule.max_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid * grad_sq < noise_floor) return 0.0;
      r = ratio_at(mid);
      if (r >= a && r <= b) return mid;
      if (r > b)
        lo = mid;
      else
        hi = mid;
    }
  }
  throw StepSearchError("goldstein-armijo search failed within " +
                            std::to_string(rule.max_bisections) + " bisections",
                        trace_so_far, theta);
}

}  // namespace detail

template <class Objective>
struct GdResult {
  NetParams params;
  OptTrace trace;
};

/// Scheme: Theta_{j+1} = Theta_j - h_j grad(Theta_j). The trace records
/// (j, phi, ||grad||, h_j, running max ||Theta_j||) for every iterate.
template <class Objective>
GdResult<Objective> gradient_descent(const Objective& obj, NetParams theta,
                                     const GdOptions& opt) {
  opt.step.validate();
  opt.stop.validate();
  if (opt.momentum && opt.step.kind == StepRule::Kind::GoldsteinArmijo)
    throw ConfigError("momentum requires a predetermined step rule");

  const auto t0 = std::chrono::steady_clock::now();
  OptTrace trace;
  NetParams velocity;
  if (opt.momentum) velocity = zeros_like(theta);
  double running_max = 0.0;
  double armijo_trial = opt.step.h;
  NetParams grad;

  for (long j = 0;; ++j) {
    const double phi = obj.value_and_gradient(theta, grad);
    const double gnorm = param_norm(grad);
    if (!std::isfinite(phi) || !std::isfinite(gnorm))
      throw DivergenceError("non-finite objective or gradient at iteration " + std::to_string(j),
                            trace, theta);
    const double theta_norm = param_norm(theta);
    running_max = std::max(running_max, theta_norm);
    if (opt.d_ball && theta_norm > *opt.d_ball) ++trace.d_ball_violations;
    trace.records.push_back({j, phi, gnorm, 0.0, running_max});

    if (gnorm <= opt.stop.grad_tol || gnorm == 0.0) {
      trace.reason = StopReason::GradTol;
      break;
    }
    if (j >= opt.stop.max_iters) {
      trace.reason = StopReason::MaxIters;
      break;
    }
    if (opt.stop.plateau && j >= opt.stop.plateau->window) {
      const auto& past = trace.records[trace.records.size() - 1 - opt.stop.plateau->window];
      const double denom = std::max(std::fabs(past.phi), 1e-300);
      if ((past.phi - phi) / denom < opt.stop.plateau->min_rel_decrease) {
        trace.reason = StopReason::Plateau;
        break;
      }
    }

    double h = 0.0;
    switch (opt.step.kind) {
      case StepRule::Kind::Constant:
        h = opt.step.h;
        break;
      case StepRule::Kind::InvSqrt:
        h = opt.step.h / std::sqrt(static_cast<double>(j) + 1.0);
        break;
      case StepRule::Kind::GoldsteinArmijo:
        h = detail::armijo_step(obj, theta, phi, grad, gnorm * gnorm, opt.step, armijo_trial,
                                trace);
        if (h == 0.0) {  // stationary at machine precision
          trace.reason = StopReason::NumericalFloor;
          break;
        }
        armijo_trial = h;
        break;
    }
    if (opt.step.kind == StepRule::Kind::GoldsteinArmijo && h == 0.0) break;
    trace.records.back().step = h;

    if (opt.momentum) {
      scale_params(velocity, opt.momentum_coef);
      add_scaled(velocity, grad, 1.0);
      add_scaled(theta, velocity, -h);
    } else {
      add_scaled(theta, grad, -h);
    }
  }
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(theta), std::move(trace)};
}

struct RunResult {
  Decomposition decomposition;
  OptTrace trace;
  NetParams params;
};

/// End-to-end: initialize, minimize phi, decompose.
inline RunResult run(const SymMatrix& sigma, const Architecture& arch, const SmoothAbs& mu,
                     InitScheme init, const GdOptions& opt, std::uint64_t seed) {
  PhiObjective obj(sigma, arch, mu);
  NetParams theta0 = init_params(arch, seed, init);
  auto gd = gradient_descent(obj, std::move(theta0), opt);
  RunResult r;
  r.decomposition = decompose_from(gd.params, sigma, arch);
  r.trace = std::move(gd.trace);
  r.params = std::move(gd.params);
  return r;
}

// ---- descent-condition verification ----------------------------------------

struct DescentReport {
  long steps = 0;
  long satisfied = 0;
  double fraction = 0.0;
  /// min over steps of L * (phi_j - phi_{j+1}) / ||grad_j||^2, the K
  /// actually achieved; compare against 2 alpha (1 - beta) for armijo.
  double achieved_k = 0.0;
  std::vector<bool> per_step;
};

/// Checks phi_j - phi_{j+1} >= (K / L) * ||grad_j||^2 on consecutive
/// trace records.
inline DescentReport verify_descent_condition(const OptTrace& trace, double lipschitz_bound,
                                              double k_constant) {
  DescentReport rep;
  rep.achieved_k = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
    const auto& cur = trace.records[t];
    const auto& nxt = trace.records[t + 1];
    const double decrease = cur.phi - nxt.phi;
    const double gsq = cur.grad_norm * cur.grad_norm;
    const bool ok = decrease >= (k_constant / lipschitz_bound) * gsq;
    rep.per_step.push_back(ok);
    ++rep.steps;
    if (ok) ++rep.satisfied;
    if (gsq > 0.0) rep.achieved_k = std::min(rep.achieved_k, lipschitz_bound * decrease / gsq);
  }
  rep.fraction = rep.steps == 0 ? 1.0 : static_cast<double>(rep.satisfied) / rep.steps;
  if (!std::isfinite(rep.achieved_k)) rep.achieved_k = 0.0;
  return rep;
}

}  // namespace lrs
