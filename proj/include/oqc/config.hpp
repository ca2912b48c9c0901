#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oqc/lbfgs.hpp"
#include "oqc/objectives.hpp"
#include "oqc/problem.hpp"
#include "oqc/timesteps.hpp"

namespace oqc {

/// Config problem with the offending location in the message (`file:line: ...`).
class ConfigError : public InvalidSpec {
 public:
  ConfigError(const std::string& origin, int line, const std::string& what)
      : InvalidSpec(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Everything a run needs, validated and converted to internal units (rad/ns, ns).
struct RunConfig {
  SystemSpec system;
  double duration = 10.0;
  std::optional<int> n_steps;  ///< empty: suggest from the system Hamiltonian
  TimestepOptions timestep_options;
  int n_splines = 10;
  std::vector<std::vector<double>> carriers;
  ObjectiveSpec objective;
  bool has_target = false;
  OptimizerConfig optimizer;
  SolverConfig solver;
  double init_amplitude = 0.0;
  double init_constant = 0.0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<double> fd_steps{1e-4, 1e-5, 1e-6, 1e-7};

  TimeGrid time_grid() const;
  PulseBasis pulse_basis() const;
  /// Requires a target; throws ConfigError otherwise.
  ControlProblem build_problem() const;
  /// Seeded initial guess: init_constant plus a uniform perturbation in [-a, a].
  ControlVector initial_guess() const;
};

/// Parses the line-based `key = value` format. Lines starting with `#` are comments;
/// per-subsystem arrays are comma separated; frequencies given in GHz or MHz.
/// Unknown keys, duplicates, malformed values, and inconsistent array lengths are errors.
/// Relative file references (gate files) resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>",
                            const std::string& base_dir = ".");
RunConfig parse_config(const std::string& path);

}  // namespace oqc
