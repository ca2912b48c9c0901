#pragma once

#include <random>

#include "oqc/model.hpp"
#include "oqc/objectives.hpp"

namespace testing {

using namespace oqc;

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

/// Random full-rank density matrix.
inline CMatrix random_density(int n, std::mt19937_64& rng) {
  const CMatrix a = random_matrix(n, rng);
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline CMatrix random_pure(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector psi(n);
  for (int k = 0; k < n; ++k) psi[k] = Complex(g(rng), g(rng));
  psi.normalize();
  return psi * psi.adjoint();
}

/// Two subsystems with every parameter set to something nonzero.
inline SystemSpec random_spec(int n0, int n1, std::mt19937_64& rng, bool open = true) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  SystemSpec s;
  s.subsystems.push_back({n0, u(rng), 0.2 * u(rng), u(rng), open ? 20.0 * u(rng) : 0.0,
                          open ? 10.0 * u(rng) : 0.0});
  s.subsystems.push_back({n1, u(rng), 0.2 * u(rng), u(rng), open ? 20.0 * u(rng) : 0.0,
                          open ? 10.0 * u(rng) : 0.0});
  s.couplings.push_back({0, 1, 0.05 * u(rng), 0.03 * u(rng)});
  return s;
}

/// Dense identity-tensor-operator built with explicit index arithmetic.
inline CMatrix dense_lift(const std::vector<int>& levels, int q, const CMatrix& local) {
  int dim = 1;
  for (int n : levels) dim *= n;
  int stride = 1;
  for (std::size_t k = q + 1; k < levels.size(); ++k) stride *= levels[k];
  const int nq = levels[q];
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const int lr = (r / stride) % nq;
      const int lc = (c / stride) % nq;
      // all other digits must agree
      if (r - lr * stride != c - lc * stride) continue;
      out(r, c) = local(lr, lc);
    }
  }
  return out;
}

inline CMatrix dense_lowering(int n) {
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

}  // namespace testing
