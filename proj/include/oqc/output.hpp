#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oqc/adjoint.hpp"
#include "oqc/controls.hpp"
#include "oqc/lbfgs.hpp"
#include "oqc/propagator.hpp"

namespace oqc {

/// A numeric table with a header row; column names carry their units.
struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Populations per subsystem and level at every time node (partial traces).
Table populations_table(const SystemSpec& spec, const Trajectory& traj, const std::string& file);
/// Expected occupation <a_q^dag a_q> per subsystem at every time node.
Table energy_table(const SystemSpec& spec, const Trajectory& traj, const std::string& file);
/// Normalized von Neumann entropy at every time node.
Table entropy_table(const Trajectory& traj, int dim, const std::string& file);
/// Rotating-frame drive (Re, Im) and lab-frame pulse per subsystem at the time nodes.
Table controls_table(const ControlVector& alpha, const PulseBasis& pulses, const SystemSpec& spec,
                     const TimeGrid& grid);
Table gradient_check_table(const FdReport& report);

void write_table(const std::filesystem::path& dir, const Table& table);

/// Streams optimization history, one flushed row per iteration.
class HistoryWriter {
 public:
  explicit HistoryWriter(const std::filesystem::path& path);
  void write(const IterationRecord& rec);

 private:
  std::ofstream out_;
};

/// Plain-text parameter file: a `#` header with the layout and seed, then one value per line.
void save_params(const std::filesystem::path& path, const ControlVector& alpha, std::uint64_t seed);
/// Throws InvalidSpec when the header disagrees with `expected` or the value count is wrong.
ControlVector load_params(const std::filesystem::path& path, const ControlLayout& expected);

}  // namespace oqc
