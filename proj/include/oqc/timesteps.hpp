#pragma once

#include <vector>

#include "oqc/model.hpp"

namespace oqc {

struct TimestepOptions {
  double samples_per_period = 20.0;
  int floor = 1;  ///< returned when the system Hamiltonian vanishes
  int max_power_iterations = 5000;
  double tolerance = 1e-13;
};

/// Largest |eigenvalue| of a Hermitian matrix by power iteration.
double spectral_radius(const SparseCMatrix& h, const TimestepOptions& opts = {});

/// Number of steps resolving the fastest period 2 pi / rho(H_sys) of the system Hamiltonian
/// with `samples_per_period` samples over [0, duration].
int suggest_num_timesteps(const SystemSpec& spec, double duration, const TimestepOptions& opts = {});

/// Carrier frequencies (rad/ns) worth trying for subsystem q: zero, the self-Kerr shifted
/// transitions -k xi_q, and the cross-Kerr shifts -xi_pq of its couplings.
std::vector<double> suggest_carriers(const SystemSpec& spec, int q);

}  // namespace oqc
