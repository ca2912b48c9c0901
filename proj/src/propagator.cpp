#include "oqc/propagator.hpp"

#include <cmath>
#include <string>

namespace oqc {

void TimeGrid::validate() const {
  if (n_steps < 1) throw InvalidSpec("number of time steps must be at least 1");
  if (!(duration > 0.0)) throw InvalidSpec("duration must be positive");
}

CVector solve_stage(const SparseCMatrix& m, const CVector& rhs, double dt,
                    const SolverConfig& cfg, bool adjoint, int* iterations) {
  const double half = 0.5 * dt;
  auto apply = [&](const CVector& v, CVector& out) {
    if (adjoint) {
      out.noalias() = m.adjoint() * v;
    } else {
      out.noalias() = m * v;
    }
    out = v - half * out;
  };
  auto result = gmres<Complex>(apply, rhs, cfg.gmres(), &rhs);
  if (iterations) *iterations = result.iterations;
  return std::move(result.x);
}

StepResult imr_step(const CVector& q, const SparseCMatrix& m_mid, double dt,
                    const SolverConfig& cfg) {
  StepResult out;
  out.stage = solve_stage(m_mid, q, dt, cfg, false, &out.iterations);
  out.next = q + dt * (m_mid * out.stage);
  return out;
}

void check_density(const CVector& q, int dim, double tol) {
  if (q.size() != Eigen::Index(dim) * dim) {
    throw InvalidSpec("initial state has wrong dimension");
  }
  const CMatrix rho = unvec(q, dim);
  if (std::abs(rho.trace() - Complex(1.0)) > tol) {
    throw InvalidSpec("initial state does not have unit trace");
  }
  if ((rho - rho.adjoint()).norm() > tol * std::max(1.0, rho.norm())) {
    throw InvalidSpec("initial state is not Hermitian");
  }
}

Trajectory forward_solve(const Lindbladian& model, const ControlVector& alpha,
                         const PulseBasis& pulses, const TimeGrid& grid, const CVector& q0,
                         const SolverConfig& cfg) {
  grid.validate();
  check_density(q0, model.dim());
  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(std::size_t(grid.n_steps) + 1);
  traj.states.push_back(q0);
  if (cfg.store_stages) traj.stages.reserve(std::size_t(grid.n_steps));
  const double dt = grid.step();
  for (int j = 0; j < grid.n_steps; ++j) {
    const double tmid = grid.midpoint(j);
    const auto drives = eval_drives(alpha, pulses, tmid);
    const SparseCMatrix m = model.assemble(drives, tmid);
    StepResult step;
    try {
      step = imr_step(traj.states.back(), m, dt, cfg);
    } catch (const SolverError& e) {
      throw SolverError("forward step " + std::to_string(j) + ": " + e.what(), e.residual(), j);
    }
    traj.states.push_back(std::move(step.next));
    if (cfg.store_stages) traj.stages.push_back(std::move(step.stage));
  }
  return traj;
}

}  // namespace oqc
