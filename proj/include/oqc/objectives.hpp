#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "oqc/model.hpp"
#include "oqc/types.hpp"

namespace oqc {

enum class Merit { Frobenius, Trace, Measure };
enum class InitialSet { Single, FullBasis, Ensemble, ThreeStates };

struct TargetSpec {
  enum class Kind { FixedState, Gate, PureLevel };
  Kind kind = Kind::FixedState;
  CMatrix state;  ///< FixedState
  CMatrix gate;   ///< Gate
  int level = 0;  ///< PureLevel

  static TargetSpec fixed_state(CMatrix rho) { return {Kind::FixedState, std::move(rho), {}, 0}; }
  static TargetSpec unitary(CMatrix v) { return {Kind::Gate, {}, std::move(v), 0}; }
  static TargetSpec pure_level(int m) { return {Kind::PureLevel, {}, {}, m}; }
};

struct ObjectiveSpec {
  Merit merit = Merit::Frobenius;
  double gamma1 = 0.0;         ///< penalty weight
  double penalty_width = 1.0;  ///< a in beta(t)
  double gamma2 = 0.0;         ///< Tikhonov weight
  InitialSet initial_set = InitialSet::Single;
  CMatrix single_state;         ///< used by InitialSet::Single
  std::vector<double> weights;  ///< beta_i; empty selects the defaults
  TargetSpec target;
};

// ---------------------------------------------------------------- merit functionals

/// 1/2 ||target - rho||_F^2
template <class DerivedA, class DerivedB>
double merit_frob(const Eigen::MatrixBase<DerivedA>& target,
                  const Eigen::MatrixBase<DerivedB>& rho) {
  if (target.rows() != rho.rows() || target.cols() != rho.cols()) {
    throw InvalidSpec("merit: dimension mismatch");
  }
  return 0.5 * (target - rho).squaredNorm();
}

/// 1 - Re Tr(target^dag rho)
template <class DerivedA, class DerivedB>
double merit_trace(const Eigen::MatrixBase<DerivedA>& target,
                   const Eigen::MatrixBase<DerivedB>& rho) {
  if (target.rows() != rho.rows() || target.cols() != rho.cols()) {
    throw InvalidSpec("merit: dimension mismatch");
  }
  return 1.0 - std::real((target.adjoint() * rho).trace());
}

/// Tr(N_m rho) = sum_l |l - m| rho_ll
template <class Derived>
double merit_measure(int m, const Eigen::MatrixBase<Derived>& rho) {
  const Eigen::Index n = rho.rows();
  if (m < 0 || m >= n) throw InvalidSpec("merit: level " + std::to_string(m) + " out of range");
  double acc = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) acc += double(std::abs(l - m)) * std::real(rho(l, l));
  return acc;
}

/// Tr(target^dag rho) for a pure target.
template <class DerivedA, class DerivedB>
double fidelity(const Eigen::MatrixBase<DerivedA>& target, const Eigen::MatrixBase<DerivedB>& rho) {
  const double purity = std::real((target * target).trace());
  if (std::abs(purity - 1.0) > 1e-10) throw InvalidSpec("fidelity needs a pure target state");
  return std::real((target.adjoint() * rho).trace());
}

/// Merit value evaluated directly on vec(rho).
double merit_vectorized(Merit merit, const CVector& target, int level, const CVector& q, int dim);

/// Gradient of the merit with respect to q, in the convention dJ = Re<g, dq>.
CVector merit_gradient_vectorized(Merit merit, const CVector& target, int level,
                                  const CVector& q, int dim);

// ---------------------------------------------------------------- states and targets

/// Pure basis matrix B^{kj}.
CMatrix basis_state(int k, int j, int dim);

/// (1/N^2) sum_{kj} B^{kj}
CMatrix ensemble_state(int dim);

/// rho_1 = diag(lambda), rho_2 = |psi><psi| with uniform psi, rho_3 = I/N.
std::array<CMatrix, 3> three_states(int dim);

/// |k><k|
CMatrix pure_basis_state(int k, int dim);

/// Density matrix of the uniform superposition of the listed levels.
CMatrix pure_superposition(const std::vector<int>& levels, int dim);

/// V rho0 V^dag; throws InvalidSpec when V is not unitary.
CMatrix gate_target(const CMatrix& v, const CMatrix& rho0);

CMatrix cnot_gate();
/// Swaps qubits 1 and 4 of a 4-qubit register.
CMatrix swap14_gate();

/// Plain-text complex matrix: one row per line, entries like `1+0j` or `0.5-0.5j`.
CMatrix parse_gate_text(const std::string& text);
CMatrix load_gate_file(const std::string& path);

/// beta(t) = exp(-((t - T)/a)^2) / a
double penalty_weight(double t, double duration, double width);

/// Initial states for the chosen set, in a fixed order (B^{kj} row-major in k, j).
std::vector<CMatrix> initial_states(const ObjectiveSpec& objective, int dim);

/// Target state for one initial state.
CMatrix target_state(const TargetSpec& target, const CMatrix& rho0, int dim);

/// beta_i defaults: {20, 1, 1} for ThreeStates, 1 otherwise.
std::vector<double> default_weights(InitialSet set, std::size_t count);

// ---------------------------------------------------------------- diagnostics

/// -Tr(rho log rho) / log N; eigenvalues below 1e-14 count as zero.
double von_neumann_entropy(const CMatrix& rho, int dim);
inline double von_neumann_entropy(const CMatrix& rho) {
  return von_neumann_entropy(rho, static_cast<int>(rho.rows()));
}

struct ExpectedEnergy {
  std::vector<double> per_subsystem;  ///< Tr(a_q^dag a_q rho)
  double total = 0.0;                 ///< Tr(N_0 rho), composite index weighting
};
ExpectedEnergy expected_energy(const CMatrix& rho, const SystemSpec& spec);

/// populations[q][k]: probability of subsystem q in level k (partial trace of the diagonal).
std::vector<std::vector<double>> populations(const CMatrix& rho, const SystemSpec& spec);

}  // namespace oqc
