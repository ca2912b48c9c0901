#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "oqc/types.hpp"

namespace oqc {

struct GmresOptions {
  double tolerance = 1e-12;  ///< relative residual ||b - Ax|| / ||b||
  int max_iterations = 200;
};

template <class Scalar>
struct GmresResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

template <class Scalar>
void givens(const Scalar& a, const Scalar& b, double& c, Scalar& s) {
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = Scalar(0);
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = Scalar(1);
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  // s chosen so that [c s; -conj(s) c] [a; b] = [r a/|a|; 0]
  s = (a / na) * Eigen::numext::conj(b) / r;
}

}  // namespace detail

/// Full (non-restarted) GMRES with modified Gram-Schmidt orthogonalization.
///
/// `apply(v, out)` must write A*v into `out`. Iterates until the Arnoldi residual
/// estimate drops below `tolerance * ||b||`; throws SolverError carrying the best
/// relative residual when `max_iterations` is exhausted.
template <class Scalar, class Apply>
GmresResult<Scalar> gmres(Apply&& apply, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                          const GmresOptions& options,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* initial_guess = nullptr) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = b.size();
  GmresResult<Scalar> result;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    result.x = Vector::Zero(n);
    return result;
  }
  result.x = initial_guess ? *initial_guess : Vector::Zero(n);

  Vector work(n);
  Vector r = b;
  if (initial_guess) {
    apply(result.x, work);
    r -= work;
  }
  double beta = r.norm();
  result.relative_residual = beta / bnorm;
  if (result.relative_residual <= options.tolerance) return result;

  const int m = options.max_iterations;
  std::vector<Vector> basis;
  basis.reserve(std::size_t(std::min<Eigen::Index>(m, n)) + 1);
  basis.push_back(r / beta);
  std::vector<Vector> hess;  // column k holds h(0..k+1, k)
  std::vector<double> cs;
  std::vector<Scalar> sn;
  Vector g = Vector::Zero(m + 1);
  g[0] = Scalar(beta);

  int k = 0;
  for (; k < m; ++k) {
    apply(basis[k], work);
    Vector h = Vector::Zero(k + 2);
    for (int i = 0; i <= k; ++i) {
      h[i] = basis[i].dot(work);
      work -= h[i] * basis[i];
    }
    const double hnext = work.norm();
    h[k + 1] = Scalar(hnext);
    for (int i = 0; i < k; ++i) {
      const Scalar t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -Eigen::numext::conj(sn[i]) * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    double c;
    Scalar s;
    detail::givens(h[k], h[k + 1], c, s);
    cs.push_back(c);
    sn.push_back(s);
    h[k] = c * h[k] + s * h[k + 1];
    h[k + 1] = Scalar(0);
    g[k + 1] = -Eigen::numext::conj(s) * g[k];
    g[k] = c * g[k];
    hess.push_back(std::move(h));
    result.relative_residual = std::abs(g[k + 1]) / bnorm;
    const bool breakdown = hnext <= 1e-300 * bnorm;
    if (result.relative_residual <= options.tolerance || breakdown || k + 1 == n) {
      ++k;
      break;
    }
    basis.push_back(work / hnext);
  }

  // Back substitution on the rotated upper-triangular Hessenberg system.
  Vector y(k);
  for (int i = k - 1; i >= 0; --i) {
    Scalar acc = g[i];
    for (int j = i + 1; j < k; ++j) acc -= hess[j][i] * y[j];
    y[i] = acc / hess[i][i];
  }
  for (int i = 0; i < k; ++i) result.x += y[i] * basis[i];
  result.iterations = k;

  if (result.relative_residual > options.tolerance) {
    throw SolverError("GMRES did not converge in " + std::to_string(k) +
                          " iterations (relative residual " +
                          std::to_string(result.relative_residual) + ")",
                      result.relative_residual);
  }
  return result;
}

}  // namespace oqc
