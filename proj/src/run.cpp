#include "oqc/run.hpp"

#include <cstdio>
#include <ostream>

#include "oqc/optimizer.hpp"
#include "oqc/parallel.hpp"

namespace oqc {

Mode parse_mode(const std::string& name) {
  if (name == "simulate") return Mode::Simulate;
  if (name == "optimize") return Mode::Optimize;
  if (name == "gradient-check") return Mode::GradientCheck;
  if (name == "evaluate") return Mode::Evaluate;
  throw InvalidSpec("unknown mode '" + name + "' (simulate, optimize, gradient-check, evaluate)");
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_suggested_carriers(const SystemSpec& spec, std::ostream& log) {
  for (int q = 0; q < spec.num_subsystems(); ++q) {
    log << "suggested carriers for subsystem " << q << " [GHz]:";
    for (double w : suggest_carriers(spec, q)) log << ' ' << fmt(w / kTwoPi);
    log << '\n';
  }
}

void print_objective(const ObjectiveValue& v, std::ostream& log) {
  log << "objective G = " << fmt(v.total) << "  (terminal " << fmt(v.terminal) << ", penalty "
      << fmt(v.penalty) << ", tikhonov " << fmt(v.tikhonov) << ")\n";
  for (std::size_t i = 0; i < v.fidelities.size(); ++i) {
    log << "  state " << i << ": merit " << fmt(v.merits[i]) << ", fidelity " << fmt(v.fidelities[i])
        << '\n';
  }
  log << "average fidelity = " << fmt(v.fidelity) << '\n';
}

std::string suffix(std::size_t i, std::size_t count) {
  return count > 1 ? "_" + std::to_string(i) : std::string();
}

bool is_hermitian(const CVector& q, int dim) {
  const CMatrix rho = unvec(q, dim);
  return (rho - rho.adjoint()).norm() <= 1e-12 * std::max(1.0, rho.norm());
}

ControlVector starting_point(const RunConfig& cfg, const RunOptions& opts) {
  if (opts.params) return load_params(*opts.params, cfg.pulse_basis().layout());
  return cfg.initial_guess();
}

void simulate(const RunConfig& cfg, const RunOptions& opts, RunResult& result, std::ostream& log) {
  const Lindbladian model(cfg.system);
  const PulseBasis pulses = cfg.pulse_basis();
  pulses.validate();
  const TimeGrid grid = cfg.time_grid();
  grid.validate();
  const ControlVector alpha = starting_point(cfg, opts);
  const int dim = cfg.system.dim();
  log << "simulating " << grid.n_steps << " steps over " << fmt(grid.duration) << " ns\n";

  const auto states = initial_states(cfg.objective, dim);
  SolverConfig solver = cfg.solver;
  solver.store_stages = false;
  const auto trajs = parallel_map_initials(
      states.size(),
      [&](std::size_t i) { return forward_solve(model, alpha, pulses, grid, vec(states[i]), solver); },
      cfg.workers);

  auto& tables = result.outputs.tables;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto sfx = suffix(i, trajs.size());
    tables.push_back(populations_table(cfg.system, trajs[i], "populations" + sfx + ".csv"));
    tables.push_back(energy_table(cfg.system, trajs[i], "energy" + sfx + ".csv"));
    if (is_hermitian(trajs[i].states.front(), dim)) {
      tables.push_back(entropy_table(trajs[i], dim, "entropy" + sfx + ".csv"));
    }
  }
  tables.push_back(controls_table(alpha, pulses, cfg.system, grid));
  if (cfg.has_target) {
    const ControlProblem problem = cfg.build_problem();
    std::vector<StateObjective> parts(trajs.size());
    for (std::size_t i = 0; i < trajs.size(); ++i) parts[i] = state_objective(problem, i, trajs[i]);
    result.outputs.objective = combine_objective(problem, alpha, parts);
    print_objective(*result.outputs.objective, log);
  }
}

void optimize(const RunConfig& cfg, const RunOptions& opts, RunResult& result, std::ostream& log) {
  const ControlProblem problem = cfg.build_problem();
  const ControlVector alpha0 = starting_point(cfg, opts);
  if (alpha0.values().isZero(0.0)) {
    if (cfg.objective.target.kind == TargetSpec::Kind::Gate) {
      throw InvalidSpec(
          "zero initial guess rejected for gate problems (the gradient can vanish by symmetry); "
          "set init_amplitude or init_constant");
    }
    log << "warning: starting from a zero control vector\n";
  }
  log << "optimizing " << problem.layout().size() << " parameters, " << problem.num_states()
      << " initial state(s), " << problem.time().n_steps << " time steps\n";

  std::optional<HistoryWriter> history;
  if (!opts.output_dir.empty()) history.emplace(opts.output_dir / "history.csv");
  auto& records = result.outputs.history;
  const auto opt = minimize(problem, alpha0, cfg.optimizer, [&](const IterationRecord& rec, const RVector&) {
    records.push_back(rec);
    if (history) history->write(rec);
    log << "iter " << rec.iter << "  G " << fmt(rec.objective) << "  |grad| " << fmt(rec.grad_norm)
        << "  fidelity " << fmt(rec.fidelity) << '\n';
  });

  const ControlVector alpha(problem.layout(), opt.x);
  result.outputs.params = alpha;
  result.outputs.tables.push_back(controls_table(alpha, problem.pulses(), problem.system(), problem.time()));
  ObjectiveValue final_value;
  final_value.total = opt.final.value;
  final_value.fidelity = opt.final.fidelity;
  log << "finished: " << to_string(opt.status) << " after " << (records.empty() ? 0 : records.back().iter)
      << " iterations; G = " << fmt(opt.final.value) << ", fidelity = " << fmt(opt.final.fidelity)
      << '\n';
  if (opt.steepest_fallbacks > 0) {
    log << "note: " << opt.steepest_fallbacks << " steepest-descent fallback(s)\n";
  }
  result.outputs.objective = final_value;
  if (!opt.converged()) result.exit_code = exit_code::not_converged;
}

void gradient_check(const RunConfig& cfg, const RunOptions& opts, RunResult& result,
                    std::ostream& log) {
  const ControlProblem problem = cfg.build_problem();
  const ControlVector alpha = starting_point(cfg, opts);
  const FdReport report = gradient_fd_check(problem, alpha, cfg.fd_steps);
  result.outputs.tables.push_back(gradient_check_table(report));
  result.outputs.max_gradient_error = report.max_relative_error;
  log << "checked " << report.adjoint.size() << " gradient components\n";
  log << "max relative error = " << fmt(report.max_relative_error) << '\n';
}

void evaluate(const RunConfig& cfg, const RunOptions& opts, RunResult& result, std::ostream& log) {
  if (!opts.params) throw InvalidSpec("evaluate mode needs --params");
  const ControlProblem problem = cfg.build_problem();
  const ControlVector alpha = load_params(*opts.params, problem.layout());
  const ObjectiveValue value = total_objective(problem, alpha);
  result.outputs.objective = value;
  print_objective(value, log);
  if (problem.objective().target.kind != TargetSpec::Kind::Gate ||
      problem.objective().initial_set == InitialSet::FullBasis) {
    const BasisFidelity basis = basis_average_fidelity(problem, alpha);
    result.outputs.basis_fidelity = basis.average;
    log << "basis-averaged fidelity = " << fmt(basis.average) << '\n';
    for (std::size_t q = 0; q < basis.per_subsystem.size(); ++q) {
      log << "  subsystem " << q << " in target level: " << fmt(basis.per_subsystem[q]) << '\n';
    }
  }
  result.outputs.tables.push_back(controls_table(alpha, problem.pulses(), problem.system(), problem.time()));
}

}  // namespace

RunResult run(Mode mode, RunConfig cfg, const RunOptions& opts, std::ostream& log) {
  RunResult result;
  try {
    if (opts.workers) {
      if (*opts.workers < 1) throw InvalidSpec("--workers must be at least 1");
      cfg.workers = *opts.workers;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (!opts.output_dir.empty()) std::filesystem::create_directories(opts.output_dir);
    log << "seed = " << cfg.seed << ", workers = " << cfg.workers << '\n';
    if (mode == Mode::Simulate || mode == Mode::Optimize) print_suggested_carriers(cfg.system, log);

    switch (mode) {
      case Mode::Simulate: simulate(cfg, opts, result, log); break;
      case Mode::Optimize: optimize(cfg, opts, result, log); break;
      case Mode::GradientCheck: gradient_check(cfg, opts, result, log); break;
      case Mode::Evaluate: evaluate(cfg, opts, result, log); break;
    }
    if (!opts.output_dir.empty()) {
      for (const auto& t : result.outputs.tables) write_table(opts.output_dir, t);
      if (result.outputs.params) save_params(opts.output_dir / "params.txt", *result.outputs.params, cfg.seed);
    }
  } catch (const InvalidSpec& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = exit_code::config_error;
  } catch (const SolverError& e) {
    log << "solver failure: " << e.what() << '\n';
    result.exit_code = exit_code::solver_failure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = exit_code::solver_failure;
  }
  return result;
}

}  // namespace oqc
