#pragma once

#include <array>
#include <span>
#include <vector>

#include "oqc/types.hpp"

namespace oqc {

/// Uniform quadratic B-spline grid on [0, T]: knot spacing T/(N_s - 2), centers
/// (s - 0.5) * spacing for zero-based s, so exactly N_s functions cover [0, T].
struct SplineGrid {
  double duration = 1.0;
  int n_splines = 3;

  double knot_spacing() const { return duration / double(n_splines - 2); }
  double center(int s) const { return (double(s) - 0.5) * knot_spacing(); }
  void validate() const;
};

/// Per-subsystem carrier frequencies (rad/ns); every subsystem carries the same count.
struct CarrierSpec {
  std::vector<std::vector<double>> frequencies;

  int num_carriers() const {
    return frequencies.empty() ? 0 : static_cast<int>(frequencies.front().size());
  }
  void validate(int num_subsystems) const;
};

/// Layout of the real parameter vector: subsystem-major, then spline, then carrier,
/// then (real, imaginary).
struct ControlLayout {
  int num_subsystems = 1;
  int num_splines = 3;
  int num_carriers = 1;

  Eigen::Index size() const {
    return Eigen::Index(2) * num_subsystems * num_splines * num_carriers;
  }
  Eigen::Index index(int q, int s, int f, int part) const {
    return ((Eigen::Index(q) * num_splines + s) * num_carriers + f) * 2 + part;
  }
  bool operator==(const ControlLayout&) const = default;
};

/// The optimization unknown: real parameters encoding alpha_q^{s,f} in C.
class ControlVector {
 public:
  explicit ControlVector(ControlLayout layout)
      : layout_(layout), values_(RVector::Zero(layout.size())) {}
  ControlVector(ControlLayout layout, RVector values);

  const ControlLayout& layout() const { return layout_; }
  const RVector& values() const { return values_; }
  RVector& values() { return values_; }

  Complex coefficient(int q, int s, int f) const {
    return {values_[layout_.index(q, s, f, 0)], values_[layout_.index(q, s, f, 1)]};
  }
  void set_coefficient(int q, int s, int f, Complex c) {
    values_[layout_.index(q, s, f, 0)] = c.real();
    values_[layout_.index(q, s, f, 1)] = c.imag();
  }

 private:
  ControlLayout layout_;
  RVector values_;
};

/// Grid, carriers, and derived layout; everything needed to turn parameters into pulses.
struct PulseBasis {
  SplineGrid grid;
  CarrierSpec carriers;

  ControlLayout layout() const {
    return {static_cast<int>(carriers.frequencies.size()), grid.n_splines,
            carriers.num_carriers()};
  }
  void validate() const {
    grid.validate();
    carriers.validate(static_cast<int>(carriers.frequencies.size()));
  }
};

/// Quadratic B-spline S_s(t). Zero outside the support of width 3 * spacing.
double eval_basis(const SplineGrid& grid, int s, double t);

/// Indices of the (at most three) splines whose support contains t.
struct ActiveSplines {
  int first = 0;
  int count = 0;
};
ActiveSplines active_splines(const SplineGrid& grid, double t);

/// Rotating-frame drive d_q(t) = sum_s S_s(t) sum_f alpha_q^{s,f} exp(i t Omega_q^f).
Complex eval_control(const ControlVector& alpha, const CarrierSpec& carriers,
                     const SplineGrid& grid, int q, double t);

/// d_q(t) for every subsystem.
std::vector<Complex> eval_drives(const ControlVector& alpha, const PulseBasis& basis,
                                 double t);

/// Nonzero partial derivative of d_q(t) with respect to one real parameter.
struct ControlPartial {
  Eigen::Index index;
  Complex value;
};

/// Exact partials of d_q(t); only parameters of splines active at t are returned.
/// d_q is linear in alpha, so the result does not depend on the parameter values.
std::vector<ControlPartial> control_partials(const ControlVector& alpha,
                                             const CarrierSpec& carriers,
                                             const SplineGrid& grid, int q, double t);

/// Lab-frame pulse f_q(t) = 2 Re{d_q(t) exp(i t omega_rot)}.
double lab_frame_pulse(const ControlVector& alpha, const CarrierSpec& carriers,
                       const SplineGrid& grid, int q, double t, double omega_rot);

}  // namespace oqc
