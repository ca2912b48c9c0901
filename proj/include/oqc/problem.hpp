#pragma once

#include <vector>

#include "oqc/controls.hpp"
#include "oqc/model.hpp"
#include "oqc/objectives.hpp"
#include "oqc/propagator.hpp"

namespace oqc {

/// A fully specified control problem: device, pulse parameterization, time grid,
/// objective, and solver settings. Immutable once built and safe to share across threads.
class ControlProblem {
 public:
  ControlProblem(SystemSpec system, PulseBasis pulses, TimeGrid time, ObjectiveSpec objective,
                 SolverConfig solver = {}, int workers = 1);

  const Lindbladian& model() const { return model_; }
  const SystemSpec& system() const { return model_.spec(); }
  const PulseBasis& pulses() const { return pulses_; }
  const TimeGrid& time() const { return time_; }
  const ObjectiveSpec& objective() const { return objective_; }
  const SolverConfig& solver() const { return solver_; }
  int workers() const { return workers_; }
  void set_workers(int workers);

  ControlLayout layout() const { return pulses_.layout(); }
  int dim() const { return model_.dim(); }
  std::size_t num_states() const { return initial_.size(); }
  const CVector& initial_state(std::size_t i) const { return initial_.at(i); }
  const CVector& target(std::size_t i) const { return targets_.at(i); }
  /// Effective weight of state i in the objective: beta_i / M, divided by the initial
  /// purity for three-state gate problems with the trace merit.
  double weight(std::size_t i) const { return weights_.at(i); }
  int measure_level() const { return objective_.target.level; }

  /// Same problem on a different device (same dimension), e.g. with decoherence enabled.
  ControlProblem with_system(SystemSpec system) const;

 private:
  Lindbladian model_;
  PulseBasis pulses_;
  TimeGrid time_;
  ObjectiveSpec objective_;
  SolverConfig solver_;
  int workers_;
  std::vector<CVector> initial_;
  std::vector<CVector> targets_;
  std::vector<double> weights_;
};

struct ObjectiveValue {
  double total = 0.0;     ///< G(alpha)
  double terminal = 0.0;  ///< weighted terminal merit
  double penalty = 0.0;   ///< gamma1 term
  double tikhonov = 0.0;  ///< gamma2/2 ||alpha||^2
  std::vector<double> merits;      ///< J(rho_i^tar, rho_i(T)) per state
  std::vector<double> fidelities;  ///< Re Tr(tar^dag rho(T)) / Tr(tar^dag tar) per state
  double fidelity = 0.0;           ///< mean of `fidelities`

  double merit() const { return terminal + penalty; }
};

/// Per-state pieces of the objective for one forward trajectory.
struct StateObjective {
  double merit = 0.0;
  double penalty = 0.0;  ///< dt * sum_{j<N_T} beta(t_j) J(q^j), unweighted
  double fidelity = 0.0;
};
StateObjective state_objective(const ControlProblem& problem, std::size_t i,
                               const Trajectory& traj);

/// Combines per-state pieces into G, adding the Tikhonov term, in index order.
ObjectiveValue combine_objective(const ControlProblem& problem, const ControlVector& alpha,
                                 const std::vector<StateObjective>& parts);

/// Forward solves for every initial state (in parallel) and evaluates G.
ObjectiveValue total_objective(const ControlProblem& problem, const ControlVector& alpha);

/// Fidelity averaged over all pure basis states B^{kj} at the final time. For gate targets
/// every basis state is propagated; for fixed pure targets linearity reduces the average
/// to the ensemble state. `per_subsystem` is filled for pure-level targets with the
/// reduced population of each subsystem in the target's level.
struct BasisFidelity {
  double average = 0.0;
  std::vector<double> per_subsystem;
};
BasisFidelity basis_average_fidelity(const ControlProblem& problem, const ControlVector& alpha);

}  // namespace oqc
