#include "oqc/problem.hpp"

#include <cmath>
#include <string>

#include "oqc/parallel.hpp"

namespace oqc {

namespace {

void check_physical(const CMatrix& rho, const char* what) {
  if ((rho - rho.adjoint()).norm() > 1e-10 || std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw InvalidSpec(std::string(what) + " must be Hermitian with unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidSpec(std::string(what) + " must be positive semidefinite");
  }
}

}  // namespace

ControlProblem::ControlProblem(SystemSpec system, PulseBasis pulses, TimeGrid time,
                               ObjectiveSpec objective, SolverConfig solver, int workers)
    : model_(std::move(system)),
      pulses_(std::move(pulses)),
      time_(time),
      objective_(std::move(objective)),
      solver_(solver),
      workers_(workers) {
  pulses_.validate();
  time_.validate();
  set_workers(workers);
  if (pulses_.layout().num_subsystems != model_.spec().num_subsystems()) {
    throw InvalidSpec("carrier list must have one entry per subsystem");
  }
  if (!(solver_.gmres_tol > 0.0)) throw InvalidSpec("gmres tolerance must be positive");
  if (solver_.gmres_max_iter < 1) throw InvalidSpec("gmres iteration cap must be positive");
  if (objective_.gamma1 < 0.0 || objective_.gamma2 < 0.0) {
    throw InvalidSpec("penalty and Tikhonov weights must be nonnegative");
  }
  if (!(objective_.penalty_width > 0.0)) throw InvalidSpec("penalty width must be positive");

  const int n = model_.dim();
  const auto& target = objective_.target;
  if (objective_.merit == Merit::Measure && target.kind != TargetSpec::Kind::PureLevel) {
    throw InvalidSpec("the measure merit needs a pure-level target");
  }
  switch (target.kind) {
    case TargetSpec::Kind::PureLevel:
      if (target.level < 0 || target.level >= n) {
        throw InvalidSpec("target level " + std::to_string(target.level) + " out of range");
      }
      break;
    case TargetSpec::Kind::FixedState:
      if (target.state.rows() != n || target.state.cols() != n) {
        throw InvalidSpec("target state dimension does not match the system");
      }
      check_physical(target.state, "target state");
      break;
    case TargetSpec::Kind::Gate:
      if (target.gate.rows() != n || target.gate.cols() != n) {
        throw InvalidSpec("gate dimension does not match the system");
      }
      if ((target.gate.adjoint() * target.gate - CMatrix::Identity(n, n)).norm() > 1e-10) {
        throw InvalidSpec("gate matrix is not unitary");
      }
      break;
  }

  const auto states = initial_states(objective_, n);
  std::vector<double> beta = objective_.weights.empty()
                                 ? default_weights(objective_.initial_set, states.size())
                                 : objective_.weights;
  if (beta.size() != states.size()) {
    throw InvalidSpec("expected " + std::to_string(states.size()) + " weights, got " +
                      std::to_string(beta.size()));
  }
  const bool scale_by_purity = target.kind == TargetSpec::Kind::Gate &&
                               objective_.initial_set == InitialSet::ThreeStates &&
                               objective_.merit == Merit::Trace;
  const double count = double(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!(beta[i] > 0.0)) throw InvalidSpec("weights must be strictly positive");
    if (objective_.initial_set == InitialSet::Single) check_physical(states[i], "initial state");
    double w = beta[i] / count;
    if (scale_by_purity) w /= std::real((states[i] * states[i]).trace());
    weights_.push_back(w);
    initial_.push_back(vec(states[i]));
    targets_.push_back(vec(target_state(target, states[i], n)));
  }
}

void ControlProblem::set_workers(int workers) {
  if (workers < 1) throw InvalidSpec("worker count must be at least 1");
  workers_ = workers;
}

ControlProblem ControlProblem::with_system(SystemSpec system) const {
  if (system.dim() != dim()) throw InvalidSpec("replacement system changes the dimension");
  return ControlProblem(std::move(system), pulses_, time_, objective_, solver_, workers_);
}

StateObjective state_objective(const ControlProblem& problem, std::size_t i,
                               const Trajectory& traj) {
  const auto& obj = problem.objective();
  const int n = problem.dim();
  const int level = problem.measure_level();
  const CVector& target = problem.target(i);
  StateObjective out;
  out.merit = merit_vectorized(obj.merit, target, level, traj.final_state(), n);
  if (obj.gamma1 > 0.0) {
    const auto& grid = traj.grid;
    double acc = 0.0;
    for (int j = 0; j < grid.n_steps; ++j) {
      acc += penalty_weight(grid.time(j), grid.duration, obj.penalty_width) *
             merit_vectorized(obj.merit, target, level, traj.states[std::size_t(j)], n);
    }
    out.penalty = grid.step() * acc;
  }
  out.fidelity = std::real(target.dot(traj.final_state())) / target.squaredNorm();
  return out;
}

ObjectiveValue combine_objective(const ControlProblem& problem, const ControlVector& alpha,
                                 const std::vector<StateObjective>& parts) {
  ObjectiveValue v;
  const double gamma1 = problem.objective().gamma1;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    v.terminal += problem.weight(i) * parts[i].merit;
    v.penalty += problem.weight(i) * gamma1 * parts[i].penalty;
    v.merits.push_back(parts[i].merit);
    v.fidelities.push_back(parts[i].fidelity);
    v.fidelity += parts[i].fidelity;
  }
  if (!parts.empty()) v.fidelity /= double(parts.size());
  v.tikhonov = 0.5 * problem.objective().gamma2 * alpha.values().squaredNorm();
  v.total = v.terminal + v.penalty + v.tikhonov;
  return v;
}

ObjectiveValue total_objective(const ControlProblem& problem, const ControlVector& alpha) {
  if (!(alpha.layout() == problem.layout())) {
    throw InvalidSpec("control vector layout does not match the problem");
  }
  SolverConfig cfg = problem.solver();
  cfg.store_stages = false;
  auto parts = parallel_map_initials(
      problem.num_states(),
      [&](std::size_t i) {
        const auto traj = forward_solve(problem.model(), alpha, problem.pulses(), problem.time(),
                                        problem.initial_state(i), cfg);
        return state_objective(problem, i, traj);
      },
      problem.workers());
  return combine_objective(problem, alpha, parts);
}

BasisFidelity basis_average_fidelity(const ControlProblem& problem, const ControlVector& alpha) {
  const int n = problem.dim();
  const auto& target = problem.objective().target;
  SolverConfig cfg = problem.solver();
  cfg.store_stages = false;
  auto propagate = [&](const CMatrix& rho0) {
    return unvec(forward_solve(problem.model(), alpha, problem.pulses(), problem.time(),
                               vec(rho0), cfg)
                     .final_state(),
                 n);
  };

  BasisFidelity out;
  if (target.kind == TargetSpec::Kind::Gate) {
    const auto fids = parallel_map_initials(
        std::size_t(n) * n,
        [&](std::size_t idx) {
          const CMatrix rho0 = basis_state(int(idx / n), int(idx % n), n);
          return fidelity(gate_target(target.gate, rho0), propagate(rho0));
        },
        problem.workers());
    for (double f : fids) out.average += f;
    out.average /= double(fids.size());
    return out;
  }

  const CMatrix tar = target_state(target, CMatrix::Identity(n, n) / double(n), n);
  const CMatrix rho_t = propagate(ensemble_state(n));
  out.average = fidelity(tar, rho_t);
  if (target.kind == TargetSpec::Kind::PureLevel) {
    const auto& spec = problem.system();
    const auto pops = populations(rho_t, spec);
    for (int q = 0; q < spec.num_subsystems(); ++q) {
      out.per_subsystem.push_back(pops[q][spec.level_of(target.level, q)]);
    }
  }
  return out;
}

}  // namespace oqc
