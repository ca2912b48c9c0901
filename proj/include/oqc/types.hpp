#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace oqc {

using Complex = std::complex<double>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Sparse operator on the Hilbert space or on its vectorization.
using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised when a problem definition is inconsistent (bad index, mismatched sizes, ...).
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the iterative linear solver and propagated by time integrators.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int step = -1)
      : std::runtime_error(what), residual_(residual), step_(step) {}

  double residual() const noexcept { return residual_; }
  /// Time-step index at which the failure happened, -1 when not inside a time loop.
  int step() const noexcept { return step_; }

 private:
  double residual_;
  int step_;
};

}  // namespace oqc
