#pragma once

#include <functional>
#include <vector>

#include "oqc/problem.hpp"

namespace oqc {

/// Adjoint states and stages, stored in forward time order: states[j] is q^_j
/// (j = 0..N_T) and stages[j] is z^_j (j = 0..N_T-1).
struct AdjointTrajectory {
  std::vector<CVector> states;
  std::vector<CVector> stages;
};

/// Sources driving the backward sweep. `terminal` is the sensitivity of the objective with
/// respect to q^{N_T}; `running(j, q_j)`, when set, returns the sensitivity with respect
/// to q^j from the time-integrated penalty.
struct AdjointSources {
  CVector terminal;
  std::function<CVector(int, const CVector&)> running;
};

/// Backward IMR sweep: (I - dt/2 M^dag) z^_j = q^_{j+1},
/// q^_j = q^_{j+1} + dt M^dag z^_j + running(j, q^j).
AdjointTrajectory backward_solve(const Lindbladian& model, const Trajectory& traj,
                                 const ControlVector& alpha, const PulseBasis& pulses,
                                 const AdjointSources& sources, const SolverConfig& cfg);

/// sum_j dt Re<z^_j, (dM^{j+1/2}/dalpha) z_j> + gamma2 * alpha.
///
/// M depends on alpha only through Re d_q and Im d_q at the midpoints; their partials come
/// from control_partials. When the forward trajectory carries no stages they are
/// re-solved from the stored states if `allow_recompute` is set, otherwise InvalidSpec.
RVector assemble_gradient(const Lindbladian& model, const Trajectory& traj,
                          const AdjointTrajectory& adj, const ControlVector& alpha,
                          const PulseBasis& pulses, const SolverConfig& cfg,
                          bool allow_recompute, double gamma2 = 0.0);

struct GradientResult {
  ObjectiveValue value;
  RVector gradient;
};

/// G(alpha) and its exact discrete gradient; one forward/backward pair per initial state,
/// distributed over the problem's workers and reduced in index order.
GradientResult objective_gradient(const ControlProblem& problem, const ControlVector& alpha);

struct FdReport {
  RVector adjoint;
  RVector finite_difference;  ///< central difference at the best step per component
  RVector relative_error;     ///< |adjoint - fd| / max(|adjoint|, |fd|)
  double max_relative_error = 0.0;
};

/// Compares the adjoint gradient against central differences of the discretized G,
/// taking per component the smallest error over `steps`.
FdReport gradient_fd_check(const ControlProblem& problem, const ControlVector& alpha,
                           const std::vector<double>& steps = {1e-4, 1e-5, 1e-6, 1e-7});

}  // namespace oqc
