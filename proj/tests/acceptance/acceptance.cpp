// Acceptance checks, one per criterion: `acceptance <n>` prints a single PASS/FAIL line.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "oqc/adjoint.hpp"
#include "oqc/optimizer.hpp"
#include "oqc/parallel.hpp"

using namespace oqc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

constexpr double ghz = kTwoPi;
constexpr double mhz = kTwoPi * 1e-3;
constexpr double us = 1e3;

ControlVector random_controls(const ControlLayout& layout, unsigned seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ControlVector alpha(layout);
  for (auto& v : alpha.values()) v = u(rng);
  return alpha;
}

/// Two transmons with the gate example's device parameters.
SystemSpec cnot_device(bool open = true) {
  SystemSpec s;
  s.subsystems = {{2, 4.105 * ghz, 219.8 * mhz, 4.105 * ghz, open ? 56 * us : 0.0, open ? 28 * us : 0.0},
                  {2, 4.812 * ghz, 225.2 * mhz, 4.812 * ghz, open ? 58 * us : 0.0, open ? 28 * us : 0.0}};
  s.couplings = {{0, 1, 0.0, 10 * mhz}};
  return s;
}

ControlProblem cnot_problem(int n_steps, int n_splines, int workers = 1) {
  ObjectiveSpec obj;
  obj.merit = Merit::Frobenius;
  obj.initial_set = InitialSet::FullBasis;
  obj.target = TargetSpec::unitary(cnot_gate());
  const double xi12 = 10 * mhz;
  const PulseBasis pulses{{70.0, n_splines}, {{{0.0, -xi12}, {0.0, -xi12}}}};
  return ControlProblem(cnot_device(), pulses, {70.0, n_steps}, obj, {}, workers);
}

SystemSpec resonant_qubit(double t1 = 0.0) {
  SystemSpec s;
  s.subsystems = {{2, 4.1 * ghz, 0.0, 4.1 * ghz, t1, 0.0}};
  return s;
}

// ---------------------------------------------------------------- 1
Outcome decay_oracle() {
  const auto start = Clock::now();
  const double t1 = 50.0;
  const Lindbladian model(resonant_qubit(t1));
  const PulseBasis pulses{{t1, 4}, {{{0.0}}}};
  const ControlVector zero(pulses.layout());
  auto error = [&](int steps) {
    const auto traj = forward_solve(model, zero, pulses, {t1, steps}, vec(pure_basis_state(1, 2)), {});
    return std::abs(unvec(traj.final_state(), 2)(1, 1).real() - std::exp(-1.0));
  };
  const double e1 = error(1000);
  const double e2 = error(2000);
  const double ratio = e1 / e2;
  const double elapsed = seconds_since(start);
  return {e1 <= 1e-5 && ratio >= 3.5 && ratio <= 4.5 && elapsed < 1.0,
          "error " + fmt(e1) + " at N_T=1000, halving ratio " + fmt(ratio) + ", " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- 2
Outcome conservation() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  auto device = [&](bool open) {
    SystemSpec s;
    for (int q = 0; q < 2; ++q) {
      s.subsystems.push_back({2, u(rng) * ghz, 0.2 * u(rng) * ghz, u(rng) * ghz,
                              open ? 30 * u(rng) : 0.0, open ? 20 * u(rng) : 0.0});
    }
    s.couplings = {{0, 1, 5 * mhz * u(rng), 10 * mhz * u(rng)}};
    return s;
  };
  const PulseBasis pulses{{20.0, 8}, {{{0.0, 0.3}, {0.0, -0.3}}}};
  const auto alpha = random_controls(pulses.layout(), 7, 0.3);
  const SolverConfig cfg{1e-12, 200, false};

  double trace_err = 0.0, herm_err = 0.0, norm_err = 0.0;
  {
    const Lindbladian model(device(true));
    std::normal_distribution<double> g;
    CMatrix a(4, 4);
    for (auto& z : a.reshaped()) z = Complex(g(rng), g(rng));
    CMatrix rho0 = a * a.adjoint();
    rho0 /= rho0.trace();
    const auto traj = forward_solve(model, alpha, pulses, {20.0, 1000}, vec(rho0), cfg);
    for (const auto& q : traj.states) {
      const CMatrix rho = unvec(q, 4);
      trace_err = std::max(trace_err, std::abs(rho.trace() - Complex(1.0)));
      herm_err = std::max(herm_err, (rho - rho.adjoint()).norm());
    }
  }
  {
    const Lindbladian model(device(false));
    const auto traj = forward_solve(model, alpha, pulses, {20.0, 1000}, vec(pure_superposition({0, 3}, 4)), cfg);
    const double n0 = traj.states.front().norm();
    for (const auto& q : traj.states) norm_err = std::max(norm_err, std::abs(q.norm() - n0));
  }
  const double elapsed = seconds_since(start);
  return {trace_err <= 1e-9 && herm_err <= 1e-9 && norm_err <= 1e-9 && elapsed < 10.0,
          "max |Tr-1| " + fmt(trace_err) + ", max ||rho-rho^dag|| " + fmt(herm_err) +
              ", closed norm drift " + fmt(norm_err) + ", " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- 3
Outcome adjoint_exactness() {
  const auto start = Clock::now();
  const PulseBasis pulses{{20.0, 4}, {{{0.0}, {0.0}}}};
  SystemSpec device = cnot_device();
  for (auto& s : device.subsystems) {  // short decay times make the dissipative terms matter
    s.t_decay = 40.0;
    s.t_dephase = 25.0;
  }
  const std::pair<Merit, const char*> merits[] = {
      {Merit::Frobenius, "Frob"}, {Merit::Trace, "Tr"}, {Merit::Measure, "Measure"}};
  const std::pair<InitialSet, const char*> sets[] = {{InitialSet::Single, "Single"},
                                                     {InitialSet::ThreeStates, "ThreeStates"},
                                                     {InitialSet::FullBasis, "FullBasis"},
                                                     {InitialSet::Ensemble, "Ensemble"}};
  double worst = 0.0;
  std::string worst_case;
  std::ostringstream all;
  for (const auto& [merit, mname] : merits) {
    for (const auto& [set, sname] : sets) {
      ObjectiveSpec obj;
      obj.merit = merit;
      obj.initial_set = set;
      obj.gamma1 = 0.1;
      obj.penalty_width = 2.0;
      obj.single_state = pure_basis_state(0, 4);
      if (merit == Merit::Measure) {
        obj.target = TargetSpec::pure_level(0);
      } else if (set == InitialSet::Single || set == InitialSet::Ensemble) {
        obj.target = TargetSpec::fixed_state(pure_superposition({0, 3}, 4));
      } else {
        obj.target = TargetSpec::unitary(cnot_gate());
      }
      const ControlProblem problem(device, pulses, {20.0, 50}, obj, {1e-14, 200, true});
      const auto alpha = random_controls(problem.layout(), 31, 0.2);
      const double err = gradient_fd_check(problem, alpha).max_relative_error;
      all << ' ' << mname << '/' << sname << '=' << fmt(err);
      if (err >= worst) {
        worst = err;
        worst_case = std::string(mname) + "/" + sname;
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::cout << "  per case:" << all.str() << '\n';
  return {worst <= 1e-6 && elapsed < 120.0,
          "max relative error " + fmt(worst) + " (" + worst_case + "), " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- 4
Outcome ensemble_reduction() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (int n : {2, 3}) {
    SystemSpec s;
    s.subsystems = {{n, 4.4 * ghz, 230 * mhz, 4.39 * ghz, 40.0, 30.0}};
    const PulseBasis pulses{{10.0, 6}, {{{0.0, -230 * mhz}}}};
    ObjectiveSpec obj;
    obj.merit = Merit::Measure;
    obj.target = TargetSpec::pure_level(0);
    obj.gamma1 = 0.2;
    obj.initial_set = InitialSet::FullBasis;
    const ControlProblem full(s, pulses, {10.0, 200}, obj);
    obj.initial_set = InitialSet::Ensemble;
    const ControlProblem ensemble(s, pulses, {10.0, 200}, obj);
    const auto alpha = random_controls(full.layout(), 5 + n, 0.3);
    worst = std::max(worst, std::abs(total_objective(full, alpha).total - total_objective(ensemble, alpha).total));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-10 && elapsed < 30.0,
          "max |G_full - G_ensemble| " + fmt(worst) + " over N = 2, 3; " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- 5, 6
ControlProblem transfer_problem(double t1) {
  ObjectiveSpec obj;
  obj.single_state = pure_basis_state(0, 2);
  obj.target = TargetSpec::fixed_state(pure_basis_state(1, 2));
  const PulseBasis pulses{{10.0, 10}, {{{0.0}}}};
  return ControlProblem(resonant_qubit(t1), pulses, {10.0, 200}, obj);
}

Outcome state_transfer() {
  const auto start = Clock::now();
  const auto problem = transfer_problem(0.0);
  const auto r = minimize(problem, random_controls(problem.layout(), 1, 0.01), OptimizerConfig{});
  const double fid = total_objective(problem, ControlVector(problem.layout(), r.x)).fidelity;
  const double elapsed = seconds_since(start);
  return {fid >= 0.9999 && elapsed < 300.0,
          "fidelity " + fmt(fid) + " after " + std::to_string(r.history.back().iter) + " iterations (" +
              to_string(r.status) + "), " + fmt(elapsed) + " s"};
}

Outcome open_vs_closed() {
  const auto start = Clock::now();
  const auto closed = transfer_problem(0.0);
  const auto alpha0 = random_controls(closed.layout(), 1, 0.01);
  const ControlVector closed_opt(closed.layout(), minimize(closed, alpha0, OptimizerConfig{}).x);

  const double t1s[] = {500.0, 100.0, 50.0, 25.0};
  std::vector<double> closed_fid;
  std::ostringstream detail;
  detail << "closed-optimized fidelity at T1 = 500/100/50/25 ns:";
  for (double t1 : t1s) {
    closed_fid.push_back(total_objective(transfer_problem(t1), closed_opt).fidelity);
    detail << ' ' << fmt(closed_fid.back());
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < closed_fid.size(); ++k) decreasing = decreasing && closed_fid[k] < closed_fid[k - 1];

  const auto open = transfer_problem(25.0);
  const ControlVector open_opt(open.layout(), minimize(open, alpha0, OptimizerConfig{}).x);
  const double open_fid = total_objective(open, open_opt).fidelity;
  detail << "; open-optimized at 25 ns: " << fmt(open_fid);
  const double elapsed = seconds_since(start);
  detail << "; " << fmt(elapsed) << " s";
  return {decreasing && open_fid > closed_fid.back() && elapsed < 1800.0, detail.str()};
}

// ---------------------------------------------------------------- 7, 8
struct CnotRun {
  ControlVector alpha;
  OptimizationResult result;
};

CnotRun optimize_cnot() {
  const auto problem = cnot_problem(700, 50);
  OptimizerConfig cfg;
  cfg.max_iters = 400;
  const auto alpha0 = random_controls(problem.layout(), 1, 0.01);
  auto r = minimize(problem, alpha0, cfg);
  return {ControlVector(problem.layout(), r.x), std::move(r)};
}

Outcome cnot_gate_optimization() {
  const auto start = Clock::now();
  const auto problem = cnot_problem(700, 50);
  const auto run = optimize_cnot();
  const double fid = total_objective(problem, run.alpha).fidelity;
  const double g0 = run.result.history.front().grad_norm;
  const double g1 = run.result.history.back().grad_norm;
  const double elapsed = seconds_since(start);
  return {fid >= 0.99 && g0 / g1 >= 1e2 && elapsed <= 7200.0,
          "average gate fidelity " + fmt(fid) + ", gradient norm " + fmt(g0) + " -> " + fmt(g1) +
              " (reduction " + fmt(g0 / g1) + "), " + to_string(run.result.status) + ", " + fmt(elapsed) + " s"};
}

Outcome hessian_structure() {
  const auto start = Clock::now();
  const auto problem = cnot_problem(700, 50);
  const auto run = optimize_cnot();
  const auto spec = hessian_spectrum(problem, run.alpha, 1e-5);
  RVector mags = spec.eigenvalues.cwiseAbs();
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double ratio = mags[14] / mags[15];
  std::ostringstream top;
  for (int k = 0; k < 18; ++k) top << (k ? " " : "") << fmt(mags[k]);
  std::cout << "  leading |eigenvalues|: " << top.str() << '\n';
  const double elapsed = seconds_since(start);
  return {ratio >= 10.0, "|lambda_15| / |lambda_16| = " + fmt(ratio) + ", asymmetry " + fmt(spec.asymmetry) +
                             ", gradient norm at optimum " + fmt(run.result.final.gradient.norm()) + ", " +
                             fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------- 9
Outcome gradient_cost() {
  auto time_gradient = [](int n_splines) {
    const auto problem = cnot_problem(700, n_splines);
    const auto alpha = random_controls(problem.layout(), 3, 0.05);
    objective_gradient(problem, alpha);  // warm-up
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = Clock::now();
      objective_gradient(problem, alpha);
      best = std::min(best, seconds_since(start));
    }
    return best;
  };
  const double t10 = time_gradient(10);
  const double t40 = time_gradient(40);
  const double change = std::abs(t40 / t10 - 1.0);
  return {change < 0.2, "gradient wall time " + fmt(t10) + " s at N_s=10, " + fmt(t40) +
                            " s at N_s=40 (change " + fmt(100 * change) + "%)"};
}

// ---------------------------------------------------------------- 10
Outcome parallel_speedup() {
  auto problem = cnot_problem(20000, 50);
  const auto alpha = random_controls(problem.layout(), 4, 0.05);
  auto timed = [&](int workers) {
    problem.set_workers(workers);
    const auto start = Clock::now();
    auto r = objective_gradient(problem, alpha);
    return std::pair{seconds_since(start), std::move(r)};
  };
  const auto [t1, r1] = timed(1);
  const auto [t4, r4] = timed(4);
  const bool identical = r1.value.total == r4.value.total && r1.gradient == r4.gradient;
  const double speedup = t1 / t4;
  const double per_solve = t1 / double(problem.num_states());
  return {identical && speedup >= 3.0 && per_solve >= 0.1,
          "speedup " + fmt(speedup) + "x with 4 workers (" + fmt(t1) + " s vs " + fmt(t4) + " s, " +
              fmt(per_solve) + " s per state), results " + (identical ? "bitwise identical" : "DIFFER") +
              ", hardware threads " + std::to_string(std::thread::hardware_concurrency())};
}

// ---------------------------------------------------------------- smoke tests
Outcome cavity_reset_smoke() {
  const auto start = Clock::now();
  SystemSpec s;
  s.subsystems = {{2, 4.41666 * ghz, 230.56 * mhz, 4.41666 * ghz, 80 * us, 26 * us},
                  {2, 4.510 * ghz, 251.0 * mhz, 4.510 * ghz, 90 * us, 30 * us},
                  {5, 6.84081 * ghz, 0.0, 6.84081 * ghz, 0.3892 * us, 0.0}};
  s.couplings = {{0, 1, 0.0, 0.001 * mhz}, {0, 2, 0.0, 1.176 * mhz}, {1, 2, 0.0, 1.2 * mhz}};
  ObjectiveSpec obj;
  obj.merit = Merit::Measure;
  obj.initial_set = InitialSet::Ensemble;
  obj.target = TargetSpec::pure_level(0);
  const double duration = 400.0;
  const PulseBasis pulses{{duration, 20}, {{{0.0}, {0.0}, {0.0}}}};
  const ControlProblem problem(s, pulses, {duration, 800}, obj);
  OptimizerConfig cfg;
  cfg.max_iters = 25;
  const auto r = minimize(problem, random_controls(problem.layout(), 1, 0.005), cfg);
  bool monotone = true;
  for (std::size_t k = 1; k < r.history.size(); ++k) monotone = monotone && r.history[k].objective <= r.history[k - 1].objective;
  const bool decreased = r.history.back().objective < r.history.front().objective;
  return {monotone && decreased, "objective " + fmt(r.history.front().objective) + " -> " +
                                     fmt(r.history.back().objective) + " over " +
                                     std::to_string(r.history.size() - 1) + " iterations, " +
                                     (monotone ? "monotone" : "NOT monotone") + ", " + fmt(seconds_since(start)) + " s"};
}

Outcome swap14_smoke() {
  const auto start = Clock::now();
  const double f[] = {5.1771, 4.9639, 4.91526, 4.8118};
  const double xi[] = {334.9, 321.8, 341.0, 350.1};
  const double t1[] = {93.79, 91.67, 91.87, 95.67};
  const double t2[] = {102.52, 101.2, 112.34, 105.43};
  SystemSpec s;
  for (int q = 0; q < 4; ++q) s.subsystems.push_back({2, f[q] * ghz, xi[q] * mhz, f[q] * ghz, t1[q] * us, t2[q] * us});
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q) s.couplings.push_back({p, q, 0.0, 100 * mhz});
  const double xpq = 100 * mhz;
  const std::vector<double> carriers{0.0, -xpq, -2 * xpq, -3 * xpq};
  ObjectiveSpec obj;
  obj.merit = Merit::Frobenius;
  obj.initial_set = InitialSet::ThreeStates;
  obj.target = TargetSpec::unitary(swap14_gate());
  const PulseBasis pulses{{10.0, 50}, {std::vector<std::vector<double>>(4, carriers)}};
  const ControlProblem problem(s, pulses, {10.0, 500}, obj);
  OptimizerConfig cfg;
  cfg.max_iters = 150;
  // Near-zero pulses sit at a stationary point: the permutation fixes two of the three states.
  const auto r = minimize(problem, random_controls(problem.layout(), 1, 1.0), cfg);
  const double g0 = r.history.front().objective, g1 = r.history.back().objective;
  return {g0 / g1 >= 10.0, "objective " + fmt(g0) + " -> " + fmt(g1) + " (factor " + fmt(g0 / g1) + ") in " +
                               std::to_string(r.history.size() - 1) + " iterations, " + fmt(seconds_since(start)) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<const char*, std::function<Outcome()>>> checks{
      {"1", {"analytic decay oracle", decay_oracle}},
      {"2", {"conservation suite", conservation}},
      {"3", {"discrete-adjoint exactness", adjoint_exactness}},
      {"4", {"ensemble-reduction oracle", ensemble_reduction}},
      {"5", {"state-to-state optimization", state_transfer}},
      {"6", {"open-vs-closed ordering", open_vs_closed}},
      {"7", {"CNOT gate optimization", cnot_gate_optimization}},
      {"8", {"Hessian spectrum structure", hessian_structure}},
      {"9", {"gradient-cost independence", gradient_cost}},
      {"10", {"parallel-map speedup", parallel_speedup}},
      {"cavity-reset", {"2x2x5 cavity reset smoke test", cavity_reset_smoke}},
      {"swap14", {"SWAP-14 smoke test", swap14_smoke}},
  };
  if (argc != 2 || !checks.count(argv[1])) {
    std::cerr << "usage: acceptance <1-10|cavity-reset|swap14>\n";
    return 2;
  }
  const auto& [name, fn] = checks.at(argv[1]);
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "criterion " << argv[1] << " (" << name << "): " << (out.pass ? "PASS" : "FAIL") << "; "
            << out.detail << std::endl;
  return out.pass ? 0 : 1;
}
