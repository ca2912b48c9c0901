#include "oqc/controls.hpp"

#include <cmath>
#include <string>

namespace oqc {

namespace {

void check_layout(const ControlVector& alpha, const CarrierSpec& carriers,
                  const SplineGrid& grid, int q) {
  const ControlLayout expected{static_cast<int>(carriers.frequencies.size()), grid.n_splines,
                               carriers.num_carriers()};
  if (!(alpha.layout() == expected)) {
    throw InvalidSpec("control vector layout does not match splines/carriers");
  }
  if (q < 0 || q >= expected.num_subsystems) {
    throw InvalidSpec("subsystem index " + std::to_string(q) + " out of range");
  }
}

double quadratic_bspline(double x) {
  if (x < 0.0 || x >= 3.0) return 0.0;
  if (x < 1.0) return 0.5 * x * x;
  if (x < 2.0) return 0.5 * (-2.0 * x * x + 6.0 * x - 3.0);
  const double r = 3.0 - x;
  return 0.5 * r * r;
}

}  // namespace

void SplineGrid::validate() const {
  if (n_splines < 3) throw InvalidSpec("at least 3 splines are required");
  if (!(duration > 0.0)) throw InvalidSpec("duration must be positive");
}

void CarrierSpec::validate(int num_subsystems) const {
  if (static_cast<int>(frequencies.size()) != num_subsystems) {
    throw InvalidSpec("carrier list must have one entry per subsystem");
  }
  const int nf = num_carriers();
  if (nf < 1) throw InvalidSpec("at least one carrier frequency is required");
  for (const auto& f : frequencies) {
    if (static_cast<int>(f.size()) != nf) {
      throw InvalidSpec("all subsystems need the same number of carriers");
    }
  }
}

ControlVector::ControlVector(ControlLayout layout, RVector values)
    : layout_(layout), values_(std::move(values)) {
  if (values_.size() != layout_.size()) {
    throw InvalidSpec("control vector has " + std::to_string(values_.size()) +
                      " entries, layout needs " + std::to_string(layout_.size()));
  }
}

double eval_basis(const SplineGrid& grid, int s, double t) {
  if (s < 0 || s >= grid.n_splines) {
    throw InvalidSpec("spline index " + std::to_string(s) + " out of range");
  }
  const double x = (t - grid.center(s)) / grid.knot_spacing() + 1.5;
  return quadratic_bspline(x);
}

ActiveSplines active_splines(const SplineGrid& grid, double t) {
  const int base = static_cast<int>(std::floor(t / grid.knot_spacing()));
  const int first = std::max(base, 0);
  const int last = std::min(base + 2, grid.n_splines - 1);
  return {first, std::max(last - first + 1, 0)};
}

Complex eval_control(const ControlVector& alpha, const CarrierSpec& carriers,
                     const SplineGrid& grid, int q, double t) {
  check_layout(alpha, carriers, grid, q);
  const auto& freqs = carriers.frequencies[q];
  const auto active = active_splines(grid, t);
  Complex d{0.0};
  for (int s = active.first; s < active.first + active.count; ++s) {
    const double weight = eval_basis(grid, s, t);
    if (weight == 0.0) continue;
    Complex sum{0.0};
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      sum += alpha.coefficient(q, s, int(f)) * std::polar(1.0, t * freqs[f]);
    }
    d += weight * sum;
  }
  return d;
}

std::vector<Complex> eval_drives(const ControlVector& alpha, const PulseBasis& basis,
                                 double t) {
  const int nsub = static_cast<int>(basis.carriers.frequencies.size());
  std::vector<Complex> drives(nsub);
  for (int q = 0; q < nsub; ++q) drives[q] = eval_control(alpha, basis.carriers, basis.grid, q, t);
  return drives;
}

std::vector<ControlPartial> control_partials(const ControlVector& alpha,
                                             const CarrierSpec& carriers,
                                             const SplineGrid& grid, int q, double t) {
  check_layout(alpha, carriers, grid, q);
  const auto& freqs = carriers.frequencies[q];
  const auto& layout = alpha.layout();
  const auto active = active_splines(grid, t);
  std::vector<ControlPartial> out;
  out.reserve(std::size_t(active.count) * freqs.size() * 2);
  for (int s = active.first; s < active.first + active.count; ++s) {
    const double weight = eval_basis(grid, s, t);
    if (weight == 0.0) continue;
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      const Complex carrier = weight * std::polar(1.0, t * freqs[f]);
      out.push_back({layout.index(q, s, int(f), 0), carrier});
      out.push_back({layout.index(q, s, int(f), 1), kI * carrier});
    }
  }
  return out;
}

double lab_frame_pulse(const ControlVector& alpha, const CarrierSpec& carriers,
                       const SplineGrid& grid, int q, double t, double omega_rot) {
  const Complex d = eval_control(alpha, carriers, grid, q, t);
  return 2.0 * (d * std::polar(1.0, t * omega_rot)).real();
}

}  // namespace oqc
