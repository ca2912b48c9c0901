#pragma once

#include <vector>

#include "oqc/controls.hpp"
#include "oqc/gmres.hpp"
#include "oqc/model.hpp"
#include "oqc/types.hpp"

namespace oqc {

/// Uniform time grid t_j = j * T / N_T.
struct TimeGrid {
  double duration = 1.0;
  int n_steps = 1;

  double step() const { return duration / double(n_steps); }
  double time(int j) const { return double(j) * step(); }
  double midpoint(int j) const { return (double(j) + 0.5) * step(); }
  void validate() const;
};

struct SolverConfig {
  double gmres_tol = 1e-12;
  int gmres_max_iter = 200;
  bool store_stages = true;

  GmresOptions gmres() const { return {gmres_tol, gmres_max_iter}; }
};

/// States q^0..q^{N_T} of a forward solve, plus stage vectors z^0..z^{N_T-1} when kept.
struct Trajectory {
  TimeGrid grid;
  std::vector<CVector> states;
  std::vector<CVector> stages;

  bool has_stages() const { return !stages.empty(); }
  const CVector& final_state() const { return states.back(); }
};

struct StepResult {
  CVector next;
  CVector stage;
  int iterations = 0;
};

/// Solves (I - dt/2 A) z = rhs where A is `m`, or its adjoint when `adjoint` is set.
CVector solve_stage(const SparseCMatrix& m, const CVector& rhs, double dt,
                    const SolverConfig& cfg, bool adjoint = false, int* iterations = nullptr);

/// One implicit midpoint step: (I - dt/2 M) z = q, q_next = q + dt M z.
StepResult imr_step(const CVector& q, const SparseCMatrix& m_mid, double dt,
                    const SolverConfig& cfg);

/// Integrates dq/dt = M(t) q over `grid` with controls evaluated at step midpoints.
/// Throws InvalidSpec for an unphysical initial state and SolverError (with the step
/// index) when a stage solve fails.
Trajectory forward_solve(const Lindbladian& model, const ControlVector& alpha,
                         const PulseBasis& pulses, const TimeGrid& grid, const CVector& q0,
                         const SolverConfig& cfg);

/// Throws InvalidSpec unless unvec(q) is Hermitian with unit trace (to `tol`).
void check_density(const CVector& q, int dim, double tol = 1e-12);

}  // namespace oqc
