#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "oqc/types.hpp"

namespace oqc {

struct OptimizerConfig {
  int memory = 10;
  int max_iters = 200;
  /// Gradient-norm stopping threshold; scaled by (1 + |G_0|) when `grad_tol_relative`.
  double grad_tol = 1e-8;
  bool grad_tol_relative = true;
  double obj_tol = 1e-12;  ///< stop once G <= obj_tol
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_trials = 30;
  double curvature_floor = 1e-14;  ///< pairs with y^T s at or below this are dropped and memory restarts

  void validate() const {
    if (memory < 1) throw InvalidSpec("L-BFGS memory must be at least 1");
    if (max_iters < 0) throw InvalidSpec("iteration cap must be nonnegative");
    if (!(grad_tol > 0.0) || !(obj_tol > 0.0)) throw InvalidSpec("tolerances must be positive");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw InvalidSpec("Armijo constant must be in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidSpec("backtracking factor must be in (0, 1)");
    if (max_trials < 1) throw InvalidSpec("line search needs at least one trial");
  }
};

/// Value, gradient, and optional diagnostics returned by an objective callback.
struct Evaluation {
  double value = 0.0;
  RVector gradient;
  double merit = std::numeric_limits<double>::quiet_NaN();
  double fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double merit = 0.0;
  double grad_norm = 0.0;
  double fidelity = 0.0;
  double step = 0.0;
};

enum class OptimizerStatus { GradientTolerance, ObjectiveTolerance, MaxIterations, LineSearchFailure };

inline const char* to_string(OptimizerStatus s) {
  switch (s) {
    case OptimizerStatus::GradientTolerance: return "gradient tolerance reached";
    case OptimizerStatus::ObjectiveTolerance: return "objective tolerance reached";
    case OptimizerStatus::MaxIterations: return "iteration limit reached";
    case OptimizerStatus::LineSearchFailure: return "line search failed";
  }
  return "unknown";
}

struct OptimizationResult {
  RVector x;
  Evaluation final;
  std::vector<IterationRecord> history;
  OptimizerStatus status = OptimizerStatus::MaxIterations;
  int steepest_fallbacks = 0;  ///< iterations where the L-BFGS direction was not a descent direction
  double grad_tolerance = 0.0;

  bool converged() const {
    return status == OptimizerStatus::GradientTolerance ||
           status == OptimizerStatus::ObjectiveTolerance;
  }
};

using IterationCallback = std::function<void(const IterationRecord&, const RVector&)>;

/// L-BFGS with two-loop recursion and Armijo backtracking.
///
/// `fn(x)` returns an Evaluation. `on_iterate` is invoked for the initial point and after
/// every accepted iterate. Line-search exhaustion is a terminal status, not an exception.
/// A SolverError at a trial point rejects that trial; at the initial point it propagates.
template <class Fn>
OptimizationResult lbfgs_minimize(Fn&& fn, RVector x0, const OptimizerConfig& cfg,
                                  const IterationCallback& on_iterate = {}) {
  cfg.validate();
  OptimizationResult result;
  result.x = std::move(x0);
  Evaluation current = fn(result.x);

  auto record = [&](int iter, double step) {
    IterationRecord r{iter, current.value, std::isnan(current.merit) ? current.value : current.merit,
                      current.gradient.norm(), current.fidelity, step};
    result.history.push_back(r);
    if (on_iterate) on_iterate(r, result.x);
  };
  record(0, 0.0);
  result.grad_tolerance = cfg.grad_tol_relative ? cfg.grad_tol * (1.0 + std::abs(current.value))
                                                : cfg.grad_tol;

  std::deque<RVector> s_hist;
  std::deque<RVector> y_hist;
  std::deque<double> rho_hist;

  auto direction = [&](const RVector& g) {
    RVector p = -g;
    const std::size_t m = s_hist.size();
    std::vector<double> a(m);
    for (std::size_t k = m; k-- > 0;) {
      a[k] = rho_hist[k] * s_hist[k].dot(p);
      p -= a[k] * y_hist[k];
    }
    if (m > 0) p *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double b = rho_hist[k] * y_hist[k].dot(p);
      p += (a[k] - b) * s_hist[k];
    }
    return p;
  };

  result.status = OptimizerStatus::MaxIterations;
  for (int iter = 1;; ++iter) {
    if (current.gradient.norm() <= result.grad_tolerance) {
      result.status = OptimizerStatus::GradientTolerance;
      break;
    }
    if (current.value <= cfg.obj_tol) {
      result.status = OptimizerStatus::ObjectiveTolerance;
      break;
    }
    if (iter > cfg.max_iters) {
      result.status = OptimizerStatus::MaxIterations;
      break;
    }

    RVector p = direction(current.gradient);
    double slope = current.gradient.dot(p);
    if (!(slope < 0.0)) {
      ++result.steepest_fallbacks;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      p = -current.gradient;
      slope = -current.gradient.squaredNorm();
    }

    bool accepted = false;
    double step = 1.0;
    Evaluation trial;
    RVector x_new;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      step = 1.0;
      for (int t = 0; t < cfg.max_trials; ++t) {
        x_new = result.x + step * p;
        try {
          trial = fn(x_new);
        } catch (const SolverError&) {
          // An overlong trial step can stiffen the stage systems past the GMRES cap; shorten it.
          step *= cfg.backtrack;
          continue;
        }
        if (std::isfinite(trial.value) &&
            trial.value <= current.value + cfg.armijo_c1 * step * slope) {
          accepted = true;
          break;
        }
        step *= cfg.backtrack;
      }
      if (!accepted) {
        if (s_hist.empty()) break;
        // Retry once along steepest descent with a fresh memory.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        p = -current.gradient;
        slope = -current.gradient.squaredNorm();
      }
    }
    if (!accepted) {
      result.status = OptimizerStatus::LineSearchFailure;
      break;
    }

    RVector s = x_new - result.x;
    RVector y = trial.gradient - current.gradient;
    const double ys = y.dot(s);
    if (ys > cfg.curvature_floor) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / ys);
      if (static_cast<int>(s_hist.size()) > cfg.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    } else {
      // Stale pairs alone keep accepting unit steps of a wrong model; restart instead.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    result.x = std::move(x_new);
    current = std::move(trial);
    record(iter, step);
  }
  result.final = std::move(current);
  return result;
}

}  // namespace oqc
