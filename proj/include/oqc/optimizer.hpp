#pragma once

#include <algorithm>
#include <functional>

#include "oqc/adjoint.hpp"
#include "oqc/lbfgs.hpp"

namespace oqc {

/// Minimizes G(alpha) of a control problem with L-BFGS, using the adjoint gradient.
OptimizationResult minimize(const ControlProblem& problem, const ControlVector& alpha0,
                            const OptimizerConfig& cfg, const IterationCallback& on_iterate = {});

struct HessianSpectrum {
  RVector eigenvalues;      ///< descending
  double asymmetry = 0.0;   ///< ||H - H^T||_F / ||H||_F before symmetrization
  RMatrix hessian;          ///< symmetrized
};

/// Central differences of a gradient oracle, symmetrized, then a dense symmetric eigensolve.
template <class GradientFn>
HessianSpectrum hessian_spectrum(GradientFn&& gradient, const RVector& x, double fd_step) {
  if (!(fd_step > 0.0)) throw InvalidSpec("finite-difference step must be positive");
  const Eigen::Index n = x.size();
  RMatrix h(n, n);
  RVector probe = x;
  for (Eigen::Index k = 0; k < n; ++k) {
    probe[k] = x[k] + fd_step;
    const RVector plus = gradient(probe);
    probe[k] = x[k] - fd_step;
    const RVector minus = gradient(probe);
    probe[k] = x[k];
    h.col(k) = (plus - minus) / (2.0 * fd_step);
  }
  HessianSpectrum out;
  const double norm = h.norm();
  out.asymmetry = norm > 0.0 ? (h - h.transpose()).norm() / norm : 0.0;
  out.hessian = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(out.hessian, Eigen::EigenvaluesOnly);
  out.eigenvalues = eig.eigenvalues().reverse();
  return out;
}

HessianSpectrum hessian_spectrum(const ControlProblem& problem, const ControlVector& alpha,
                                 double fd_step);

}  // namespace oqc
