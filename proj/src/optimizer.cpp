#include "oqc/optimizer.hpp"

namespace oqc {

OptimizationResult minimize(const ControlProblem& problem, const ControlVector& alpha0,
                            const OptimizerConfig& cfg, const IterationCallback& on_iterate) {
  const auto layout = problem.layout();
  if (!(alpha0.layout() == layout)) {
    throw InvalidSpec("initial control vector layout does not match the problem");
  }
  auto fn = [&](const RVector& x) {
    const auto r = objective_gradient(problem, ControlVector(layout, x));
    Evaluation e;
    e.value = r.value.total;
    e.gradient = r.gradient;
    e.merit = r.value.merit();
    e.fidelity = r.value.fidelity;
    return e;
  };
  return lbfgs_minimize(fn, alpha0.values(), cfg, on_iterate);
}

HessianSpectrum hessian_spectrum(const ControlProblem& problem, const ControlVector& alpha,
                                 double fd_step) {
  const auto layout = problem.layout();
  return hessian_spectrum(
      [&](const RVector& x) { return objective_gradient(problem, ControlVector(layout, x)).gradient; },
      alpha.values(), fd_step);
}

}  // namespace oqc
