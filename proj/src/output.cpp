#include "oqc/output.hpp"

#include <cstdio>
#include <sstream>

#include "oqc/objectives.hpp"

namespace oqc {

namespace {

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format(row[c]);
  out << '\n';
}

}  // namespace

Table populations_table(const SystemSpec& spec, const Trajectory& traj, const std::string& file) {
  Table t{file, {"t[ns]"}, {}};
  for (int q = 0; q < spec.num_subsystems(); ++q) {
    for (int k = 0; k < spec.subsystems[q].n_levels; ++k) {
      t.columns.push_back("p" + std::to_string(q) + "_" + std::to_string(k));
    }
  }
  const int dim = spec.dim();
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    std::vector<double> row{traj.grid.time(int(j))};
    for (const auto& levels : populations(unvec(traj.states[j], dim), spec)) {
      row.insert(row.end(), levels.begin(), levels.end());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table energy_table(const SystemSpec& spec, const Trajectory& traj, const std::string& file) {
  Table t{file, {"t[ns]"}, {}};
  for (int q = 0; q < spec.num_subsystems(); ++q) t.columns.push_back("n" + std::to_string(q));
  const int dim = spec.dim();
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    std::vector<double> row{traj.grid.time(int(j))};
    const auto e = expected_energy(unvec(traj.states[j], dim), spec);
    row.insert(row.end(), e.per_subsystem.begin(), e.per_subsystem.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table entropy_table(const Trajectory& traj, int dim, const std::string& file) {
  Table t{file, {"t[ns]", "entropy[normalized]"}, {}};
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    t.rows.push_back({traj.grid.time(int(j)), von_neumann_entropy(unvec(traj.states[j], dim), dim)});
  }
  return t;
}

Table controls_table(const ControlVector& alpha, const PulseBasis& pulses, const SystemSpec& spec,
                     const TimeGrid& grid) {
  Table t{"controls.csv", {"t[ns]"}, {}};
  const int nq = spec.num_subsystems();
  for (int q = 0; q < nq; ++q) {
    const auto s = std::to_string(q);
    t.columns.push_back("re_d" + s + "[rad/ns]");
    t.columns.push_back("im_d" + s + "[rad/ns]");
    t.columns.push_back("f" + s + "_lab[rad/ns]");
  }
  for (int j = 0; j <= grid.n_steps; ++j) {
    const double time = grid.time(j);
    std::vector<double> row{time};
    for (int q = 0; q < nq; ++q) {
      const Complex d = eval_control(alpha, pulses.carriers, pulses.grid, q, time);
      row.push_back(d.real());
      row.push_back(d.imag());
      row.push_back(lab_frame_pulse(alpha, pulses.carriers, pulses.grid, q, time,
                                    spec.subsystems[q].omega_rot));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table gradient_check_table(const FdReport& report) {
  Table t{"gradient_check.csv", {"index", "adjoint", "finite_difference", "relative_error"}, {}};
  for (Eigen::Index k = 0; k < report.adjoint.size(); ++k) {
    t.rows.push_back({double(k), report.adjoint[k], report.finite_difference[k],
                      report.relative_error[k]});
  }
  return t;
}

void write_table(const std::filesystem::path& dir, const Table& table) {
  auto out = open_for_write(dir / table.file);
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) write_row(out, row);
  if (!out) throw std::runtime_error("error while writing " + (dir / table.file).string());
}

HistoryWriter::HistoryWriter(const std::filesystem::path& path) : out_(open_for_write(path)) {
  out_ << "iter,objective,merit,grad_norm,fidelity,step\n" << std::flush;
}

void HistoryWriter::write(const IterationRecord& r) {
  write_row(out_, {double(r.iter), r.objective, r.merit, r.grad_norm, r.fidelity, r.step});
  out_.flush();
}

void save_params(const std::filesystem::path& path, const ControlVector& alpha, std::uint64_t seed) {
  auto out = open_for_write(path);
  const auto& l = alpha.layout();
  out << "# control parameters subsystems=" << l.num_subsystems << " splines=" << l.num_splines
      << " carriers=" << l.num_carriers << " seed=" << seed << '\n';
  for (Eigen::Index k = 0; k < alpha.values().size(); ++k) out << format(alpha.values()[k]) << '\n';
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

ControlVector load_params(const std::filesystem::path& path, const ControlLayout& expected) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open parameter file " + path.string());
  std::string line;
  std::vector<double> values;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      ControlLayout found{-1, -1, -1};
      std::istringstream words(line.substr(1));
      std::string word;
      while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        const auto key = word.substr(0, eq);
        const int v = std::atoi(word.c_str() + eq + 1);
        if (key == "subsystems") found.num_subsystems = v;
        else if (key == "splines") found.num_splines = v;
        else if (key == "carriers") found.num_carriers = v;
      }
      if (found.num_subsystems >= 0) {
        if (!(found == expected)) {
          throw InvalidSpec(path.string() + ": parameter layout (" +
                            std::to_string(found.num_subsystems) + ", " +
                            std::to_string(found.num_splines) + ", " +
                            std::to_string(found.num_carriers) + ") does not match the config (" +
                            std::to_string(expected.num_subsystems) + ", " +
                            std::to_string(expected.num_splines) + ", " +
                            std::to_string(expected.num_carriers) + ")");
        }
        header_seen = true;
      }
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t\r", used) != std::string::npos) {
      throw InvalidSpec(path.string() + ":" + std::to_string(lineno) + ": malformed value");
    }
    values.push_back(v);
  }
  if (!header_seen) throw InvalidSpec(path.string() + ": missing layout header");
  if (Eigen::Index(values.size()) != expected.size()) {
    throw InvalidSpec(path.string() + ": expected " + std::to_string(expected.size()) +
                      " values, found " + std::to_string(values.size()));
  }
  return ControlVector(expected, Eigen::Map<const RVector>(values.data(), Eigen::Index(values.size())));
}

}  // namespace oqc
