#include "oqc/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oqc/parallel.hpp"

namespace oqc {

AdjointTrajectory backward_solve(const Lindbladian& model, const Trajectory& traj,
                                 const ControlVector& alpha, const PulseBasis& pulses,
                                 const AdjointSources& sources, const SolverConfig& cfg) {
  const auto& grid = traj.grid;
  const int nsteps = grid.n_steps;
  if (static_cast<int>(traj.states.size()) != nsteps + 1) {
    throw InvalidSpec("backward_solve needs a complete forward trajectory");
  }
  if (sources.terminal.size() != model.vec_dim()) {
    throw InvalidSpec("terminal adjoint has the wrong dimension");
  }
  const double dt = grid.step();
  AdjointTrajectory adj;
  adj.states.resize(std::size_t(nsteps) + 1);
  adj.stages.resize(std::size_t(nsteps));
  adj.states[std::size_t(nsteps)] = sources.terminal;
  for (int j = nsteps - 1; j >= 0; --j) {
    const double tmid = grid.midpoint(j);
    const auto drives = eval_drives(alpha, pulses, tmid);
    const SparseCMatrix m = model.assemble(drives, tmid);
    const CVector& next = adj.states[std::size_t(j) + 1];
    CVector stage;
    try {
      stage = solve_stage(m, next, dt, cfg, /*adjoint=*/true);
    } catch (const SolverError& e) {
      throw SolverError("adjoint step " + std::to_string(j) + ": " + e.what(), e.residual(), j);
    }
    CVector current = next;
    current.noalias() += dt * (m.adjoint() * stage);
    if (sources.running) current += sources.running(j, traj.states[std::size_t(j)]);
    adj.states[std::size_t(j)] = std::move(current);
    adj.stages[std::size_t(j)] = std::move(stage);
  }
  return adj;
}

RVector assemble_gradient(const Lindbladian& model, const Trajectory& traj,
                          const AdjointTrajectory& adj, const ControlVector& alpha,
                          const PulseBasis& pulses, const SolverConfig& cfg,
                          bool allow_recompute, double gamma2) {
  const auto& grid = traj.grid;
  const int nsteps = grid.n_steps;
  if (!traj.has_stages() && !allow_recompute) {
    throw InvalidSpec("forward stages were not stored and recomputation is disabled");
  }
  if (static_cast<int>(adj.stages.size()) != nsteps) {
    throw InvalidSpec("adjoint trajectory does not match the forward grid");
  }
  const double dt = grid.step();
  const int nsub = model.spec().num_subsystems();
  RVector grad = gamma2 * alpha.values();
  CVector work(model.vec_dim());
  CVector recomputed;
  for (int j = 0; j < nsteps; ++j) {
    const double tmid = grid.midpoint(j);
    const CVector* stage = nullptr;
    if (traj.has_stages()) {
      stage = &traj.stages[std::size_t(j)];
    } else {
      const auto drives = eval_drives(alpha, pulses, tmid);
      const SparseCMatrix m = model.assemble(drives, tmid);
      recomputed = solve_stage(m, traj.states[std::size_t(j)], dt, cfg);
      stage = &recomputed;
    }
    const CVector& adj_stage = adj.stages[std::size_t(j)];
    for (int q = 0; q < nsub; ++q) {
      // Sensitivities of G to Re d_q and Im d_q at this midpoint.
      work.noalias() = model.drive_derivative_re(q) * (*stage);
      const double sens_re = dt * std::real(adj_stage.dot(work));
      work.noalias() = model.drive_derivative_im(q) * (*stage);
      const double sens_im = dt * std::real(adj_stage.dot(work));
      // Chain rule through the real parameterization: each partial c = dd_q/dparam
      // contributes Re(c) * sens_re + Im(c) * sens_im.
      for (const auto& p : control_partials(alpha, pulses.carriers, pulses.grid, q, tmid)) {
        grad[p.index] += p.value.real() * sens_re + p.value.imag() * sens_im;
      }
    }
  }
  return grad;
}

GradientResult objective_gradient(const ControlProblem& problem, const ControlVector& alpha) {
  if (!(alpha.layout() == problem.layout())) {
    throw InvalidSpec("control vector layout does not match the problem");
  }
  const auto& obj = problem.objective();
  const int n = problem.dim();
  const int level = problem.measure_level();
  const SolverConfig& cfg = problem.solver();

  struct Part {
    StateObjective value;
    RVector gradient;
  };
  auto parts = parallel_map_initials(
      problem.num_states(),
      [&](std::size_t i) {
        const auto traj = forward_solve(problem.model(), alpha, problem.pulses(),
                                        problem.time(), problem.initial_state(i), cfg);
        Part part;
        part.value = state_objective(problem, i, traj);
        const double w = problem.weight(i);
        const CVector& target = problem.target(i);
        AdjointSources sources;
        sources.terminal = w * merit_gradient_vectorized(obj.merit, target, level,
                                                         traj.final_state(), n);
        if (obj.gamma1 > 0.0) {
          const auto& grid = traj.grid;
          sources.running = [&, w](int j, const CVector& q) -> CVector {
            const double scale = w * obj.gamma1 * grid.step() *
                                 penalty_weight(grid.time(j), grid.duration, obj.penalty_width);
            return scale * merit_gradient_vectorized(obj.merit, target, level, q, n);
          };
        }
        const auto adj = backward_solve(problem.model(), traj, alpha, problem.pulses(),
                                        sources, cfg);
        part.gradient = assemble_gradient(problem.model(), traj, adj, alpha, problem.pulses(),
                                          cfg, /*allow_recompute=*/true);
        return part;
      },
      problem.workers());

  GradientResult result;
  std::vector<StateObjective> values;
  values.reserve(parts.size());
  result.gradient = obj.gamma2 * alpha.values();
  for (const auto& p : parts) {
    values.push_back(p.value);
    result.gradient += p.gradient;
  }
  result.value = combine_objective(problem, alpha, values);
  return result;
}

FdReport gradient_fd_check(const ControlProblem& problem, const ControlVector& alpha,
                           const std::vector<double>& steps) {
  if (steps.empty()) throw InvalidSpec("at least one finite-difference step is required");
  FdReport report;
  report.adjoint = objective_gradient(problem, alpha).gradient;
  const Eigen::Index n = report.adjoint.size();
  report.finite_difference = RVector::Zero(n);
  report.relative_error = RVector::Constant(n, std::numeric_limits<double>::infinity());
  ControlVector probe = alpha;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (double h : steps) {
      probe.values()[k] = alpha.values()[k] + h;
      const double plus = total_objective(problem, probe).total;
      probe.values()[k] = alpha.values()[k] - h;
      const double minus = total_objective(problem, probe).total;
      probe.values()[k] = alpha.values()[k];
      const double fd = (plus - minus) / (2.0 * h);
      const double a = report.adjoint[k];
      const double scale = std::max(std::abs(a), std::abs(fd));
      const double err = scale == 0.0 ? 0.0 : std::abs(a - fd) / scale;
      if (err < report.relative_error[k]) {
        report.relative_error[k] = err;
        report.finite_difference[k] = fd;
      }
    }
  }
  report.max_relative_error = n > 0 ? report.relative_error.maxCoeff() : 0.0;
  return report;
}

}  // namespace oqc
