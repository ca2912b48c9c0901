#include "oqc/timesteps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oqc {

double spectral_radius(const SparseCMatrix& h, const TimestepOptions& opts) {
  const Eigen::Index n = h.rows();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  CVector x(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = dist(rng);
  x.normalize();
  double estimate = 0.0;
  CVector y(n);
  for (int it = 0; it < opts.max_power_iterations; ++it) {
    y.noalias() = h * x;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    const bool done = std::abs(norm - estimate) <= opts.tolerance * norm;
    estimate = norm;
    x = y / norm;
    if (done) break;
  }
  return estimate;
}

int suggest_num_timesteps(const SystemSpec& spec, double duration, const TimestepOptions& opts) {
  const double radius = spectral_radius(build_system_hamiltonian(spec), opts);
  if (radius == 0.0) return opts.floor;
  const double steps = std::ceil(opts.samples_per_period * duration * radius / kTwoPi - 1e-9);
  return std::max(opts.floor, static_cast<int>(steps));
}

std::vector<double> suggest_carriers(const SystemSpec& spec, int q) {
  std::vector<double> out{0.0};
  const auto& s = spec.subsystems.at(std::size_t(q));
  for (int k = 1; k + 1 < s.n_levels; ++k) out.push_back(-double(k) * s.xi_self);
  for (const auto& c : spec.couplings) {
    if ((c.p == q || c.q == q) && c.xi_cross != 0.0) out.push_back(-c.xi_cross);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace oqc
