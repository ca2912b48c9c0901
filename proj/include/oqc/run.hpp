#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oqc/config.hpp"
#include "oqc/output.hpp"

namespace oqc {

enum class Mode { Simulate, Optimize, GradientCheck, Evaluate };
/// Throws InvalidSpec for an unknown name.
Mode parse_mode(const std::string& name);

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int config_error = 1;
inline constexpr int solver_failure = 2;
inline constexpr int not_converged = 3;
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path output_dir;  ///< empty: keep results in memory only
  std::optional<std::filesystem::path> params;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

/// Data products of a run.
struct OutputBundle {
  std::vector<Table> tables;
  std::vector<IterationRecord> history;
  std::optional<ControlVector> params;
  std::optional<ObjectiveValue> objective;
  std::optional<double> basis_fidelity;
  std::optional<double> max_gradient_error;
};

struct RunResult {
  int exit_code = exit_code::success;
  OutputBundle outputs;
};

/// Runs one mode. Diagnostics go to `log`; failures are reported there and mapped to exit codes.
RunResult run(Mode mode, RunConfig config, const RunOptions& options, std::ostream& log);

}  // namespace oqc
