#pragma once

#include <span>
#include <utility>
#include <vector>

#include "oqc/types.hpp"

namespace oqc {

/// One oscillator of the composite device. Frequencies in rad/ns, times in ns.
struct SubsystemSpec {
  int n_levels = 2;
  double omega = 0.0;      ///< 0-1 transition frequency
  double xi_self = 0.0;    ///< self-Kerr coefficient
  double omega_rot = 0.0;  ///< rotating-frame frequency
  double t_decay = 0.0;    ///< T1; nonpositive disables the channel
  double t_dephase = 0.0;  ///< T2; nonpositive disables the channel
};

/// Pairwise coupling between subsystems p < q.
struct CouplingSpec {
  int p = 0;
  int q = 1;
  double g_jc = 0.0;      ///< Jaynes-Cummings exchange coefficient
  double xi_cross = 0.0;  ///< cross-Kerr coefficient
};

struct SystemSpec {
  std::vector<SubsystemSpec> subsystems;
  std::vector<CouplingSpec> couplings;

  int num_subsystems() const { return static_cast<int>(subsystems.size()); }
  /// Hilbert-space dimension N = prod n_q.
  int dim() const;
  /// Level index of subsystem q inside composite basis index l.
  int level_of(int l, int q) const;
  /// Throws InvalidSpec on bad level counts or coupling indices.
  void validate() const;
};

/// Kronecker-lifted lowering operator a_q = I x ... x a x ... x I. Subsystem 0 is the
/// leftmost (most significant) factor.
SparseCMatrix build_lowering(const SystemSpec& spec, int q);

/// Lifted number operator a_q^dag a_q.
SparseCMatrix build_number(const SystemSpec& spec, int q);

/// Time-independent rotating-frame system Hamiltonian. Jaynes-Cummings terms of pairs
/// with equal rotation frequencies are included here; the rest are time dependent and
/// handled by Lindbladian.
SparseCMatrix build_system_hamiltonian(const SystemSpec& spec);

/// Diagonal observable with entries |l - m| in the composite computational basis.
SparseCMatrix number_operator(int dim, int m);
inline SparseCMatrix number_operator(const SystemSpec& spec, int m) {
  return number_operator(spec.dim(), m);
}

/// Superoperator of rho -> -i[H, rho] under column-major vectorization.
SparseCMatrix commutator_superoperator(const SparseCMatrix& hamiltonian);

/// Superoperator of rho -> L rho L^dag - 1/2 {L^dag L, rho}.
SparseCMatrix dissipator_superoperator(const SparseCMatrix& collapse);

/// Vectorized Lindblad generator M(t) of the composite system.
///
/// The time-independent part (system Hamiltonian and collapse channels) is assembled
/// once; per call only the control and time-dependent coupling coefficients change, so
/// all contributions are stored as value arrays aligned to one common sparsity pattern.
class Lindbladian {
 public:
  explicit Lindbladian(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  int vec_dim() const { return dim_ * dim_; }

  /// Full Hamiltonian H(t) = H_sys + H_JC(t) + sum_q (d_q a_q + d_q^* a_q^dag).
  SparseCMatrix hamiltonian(std::span<const Complex> drive, double t) const;

  /// M(t) for the given per-subsystem rotating-frame drive amplitudes.
  SparseCMatrix assemble(std::span<const Complex> drive, double t) const;

  /// dM/dRe(d_q) and dM/dIm(d_q); M is affine in the drive so these are constant.
  const SparseCMatrix& drive_derivative_re(int q) const { return drive_re_.at(q); }
  const SparseCMatrix& drive_derivative_im(int q) const { return drive_im_.at(q); }

  /// True when no collapse channel is active.
  bool closed() const { return closed_; }

 private:
  struct TimeDependentCoupling {
    double eta;                     // omega_rot_p - omega_rot_q
    std::vector<Complex> cos_part;  // multiplies cos(eta t)
    std::vector<Complex> sin_part;  // multiplies sin(eta t)
    SparseCMatrix hamiltonian_cos;
    SparseCMatrix hamiltonian_sin;
  };

  std::vector<Complex> aligned_values(const SparseCMatrix& term) const;

  SystemSpec spec_;
  int dim_;
  bool closed_ = true;
  SparseCMatrix system_hamiltonian_;
  std::vector<SparseCMatrix> lowering_;
  SparseCMatrix pattern_;
  std::vector<Complex> base_;
  std::vector<SparseCMatrix> drive_re_;
  std::vector<SparseCMatrix> drive_im_;
  std::vector<std::vector<Complex>> drive_re_values_;
  std::vector<std::vector<Complex>> drive_im_values_;
  std::vector<TimeDependentCoupling> couplings_;
};

/// Free-function form of Lindbladian::assemble for one-off evaluations.
SparseCMatrix assemble_superoperator(const SystemSpec& spec, std::span<const Complex> drive,
                                     double t);

/// Column-major vec / unvec.
CVector vec(const CMatrix& rho);
CMatrix unvec(const CVector& q, int dim);

}  // namespace oqc
