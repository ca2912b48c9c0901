#include "oqc/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace oqc {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "nlevels", "transfreq_ghz", "transfreq_mhz", "selfkerr_ghz", "selfkerr_mhz",
      "rotfreq_ghz", "rotfreq_mhz", "crosskerr_ghz", "crosskerr_mhz", "jkl_ghz", "jkl_mhz",
      "t1_ns", "t1_us", "t2_ns", "t2_us", "duration_ns", "duration_us", "ntime",
      "samples_per_period", "ntime_floor", "nsplines", "carrier_ghz", "carrier_mhz",
      "initial", "target", "merit", "weights", "gamma_penalty", "penalty_width_ns",
      "penalty_width_us", "gamma_tikhonov", "optim_maxiter", "optim_memory", "optim_gradtol",
      "optim_gradtol_relative", "optim_objtol", "gmres_tol", "gmres_maxiter", "store_stages",
      "init_amplitude", "init_constant", "seed", "workers", "fd_steps"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  int line;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(origin_, line(key), what);
  }
  [[noreturn]] void missing(const std::string& key) const {
    throw ConfigError(origin_, 0, "missing key: " + key);
  }

  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double to_double(const std::string& key, const std::string& token) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(key, "malformed number '" + token + "' for " + key);
    }
    if (used != token.size()) fail(key, "malformed number '" + token + "' for " + key);
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& tok : split(raw(key), ',')) out.push_back(to_double(key, tok));
    return out;
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto v = list(key);
    if (v.size() != 1) fail(key, key + " expects a single value");
    return v.front();
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key, 0.0);
    if (v != std::floor(v)) fail(key, key + " expects an integer");
    return static_cast<long long>(v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, key + " expects true or false");
  }

  /// Values of `<base>_ghz` or `<base>_mhz` converted to rad/ns; empty when absent.
  std::optional<std::pair<std::string, std::vector<double>>> frequency(const std::string& base) const {
    const std::string ghz = base + "_ghz";
    const std::string mhz = base + "_mhz";
    if (has(ghz) && has(mhz)) fail(mhz, base + " given in both GHz and MHz");
    if (has(ghz)) return std::pair{ghz, scaled(list(ghz), kTwoPi)};
    if (has(mhz)) return std::pair{mhz, scaled(list(mhz), kTwoPi * 1e-3)};
    return std::nullopt;
  }

  /// Values of `<base>_ns` or `<base>_us` converted to ns; empty when absent.
  std::optional<std::pair<std::string, std::vector<double>>> duration(const std::string& base) const {
    const std::string ns = base + "_ns";
    const std::string us = base + "_us";
    if (has(ns) && has(us)) fail(us, base + " given in both ns and us");
    if (has(ns)) return std::pair{ns, list(ns)};
    if (has(us)) return std::pair{us, scaled(list(us), 1e3)};
    return std::nullopt;
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::vector<double> scaled(std::vector<double> v, double factor) {
    for (auto& x : v) x *= factor;
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::string origin_;
};

std::vector<double> per_subsystem(const Reader& r,
                                  const std::optional<std::pair<std::string, std::vector<double>>>& values,
                                  std::size_t count, double fallback) {
  if (!values) return std::vector<double>(count, fallback);
  if (values->second.size() != count) {
    r.fail(values->first, values->first + " has " + std::to_string(values->second.size()) +
                              " entries but nlevels lists " + std::to_string(count) + " subsystems");
  }
  return values->second;
}

std::vector<double> per_pair(const Reader& r,
                             const std::optional<std::pair<std::string, std::vector<double>>>& values,
                             std::size_t pairs) {
  if (!values) return std::vector<double>(pairs, 0.0);
  if (values->second.size() == 1) return std::vector<double>(pairs, values->second.front());
  if (values->second.size() != pairs) {
    r.fail(values->first, values->first + " needs 1 or " + std::to_string(pairs) +
                              " entries (one per subsystem pair)");
  }
  return values->second;
}

int parse_index(const Reader& r, const std::string& key, const std::string& token) {
  const double v = r.to_double(key, token);
  if (v != std::floor(v) || v < 0) r.fail(key, "expected a nonnegative integer, got '" + token + "'");
  return static_cast<int>(v);
}

std::vector<int> parse_levels(const Reader& r, const std::string& key, const std::string& list) {
  std::vector<int> out;
  for (const auto& tok : split(list, ',')) out.push_back(parse_index(r, key, tok));
  return out;
}

CMatrix parse_state(const Reader& r, const std::string& key, const std::string& spec, int dim) {
  try {
    if (spec.rfind("state:", 0) == 0) return pure_basis_state(parse_index(r, key, spec.substr(6)), dim);
    if (spec.rfind("pure:", 0) == 0) return pure_superposition(parse_levels(r, key, spec.substr(5)), dim);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidSpec& e) {
    r.fail(key, e.what());
  }
  r.fail(key, "unrecognized state '" + spec + "'");
}

}  // namespace

TimeGrid RunConfig::time_grid() const {
  const int steps = n_steps ? *n_steps : suggest_num_timesteps(system, duration, timestep_options);
  return {duration, steps};
}

PulseBasis RunConfig::pulse_basis() const { return {{duration, n_splines}, {carriers}}; }

ControlProblem RunConfig::build_problem() const {
  if (!has_target) throw ConfigError("<config>", 0, "missing key: target");
  return ControlProblem(system, pulse_basis(), time_grid(), objective, solver, workers);
}

ControlVector RunConfig::initial_guess() const {
  ControlVector alpha(pulse_basis().layout());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Eigen::Index k = 0; k < alpha.values().size(); ++k) {
    alpha.values()[k] = init_constant + init_amplitude * dist(rng);
  }
  return alpha;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            const std::string& base_dir) {
  std::map<std::string, Entry> entries;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(origin, lineno, "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!known_keys().count(key)) throw ConfigError(origin, lineno, "unknown key: " + key);
      if (value.empty()) throw ConfigError(origin, lineno, "empty value for " + key);
      if (entries.count(key)) throw ConfigError(origin, lineno, "duplicate key: " + key);
      entries.emplace(key, Entry{value, lineno});
    }
  }
  const Reader r(std::move(entries), origin);
  RunConfig cfg;

  // ---- system
  if (!r.has("nlevels")) r.missing("nlevels");
  std::vector<int> levels;
  for (double v : r.list("nlevels")) {
    if (v != std::floor(v) || v < 1) r.fail("nlevels", "nlevels entries must be positive integers");
    levels.push_back(static_cast<int>(v));
  }
  const std::size_t nsub = levels.size();
  const auto transfreq = r.frequency("transfreq");
  if (!transfreq) r.missing("transfreq_ghz");
  const auto omega = per_subsystem(r, transfreq, nsub, 0.0);
  const auto xi = per_subsystem(r, r.frequency("selfkerr"), nsub, 0.0);
  const auto rot_values = r.frequency("rotfreq");
  const auto rot = rot_values ? per_subsystem(r, rot_values, nsub, 0.0) : omega;
  const auto t1 = per_subsystem(r, r.duration("t1"), nsub, 0.0);
  const auto t2 = per_subsystem(r, r.duration("t2"), nsub, 0.0);
  for (std::size_t q = 0; q < nsub; ++q) {
    cfg.system.subsystems.push_back({levels[q], omega[q], xi[q], rot[q], t1[q], t2[q]});
  }
  const std::size_t npairs = nsub * (nsub - 1) / 2;
  const auto cross = per_pair(r, r.frequency("crosskerr"), npairs);
  const auto jkl = per_pair(r, r.frequency("jkl"), npairs);
  std::size_t pair = 0;
  for (std::size_t p = 0; p < nsub; ++p) {
    for (std::size_t q = p + 1; q < nsub; ++q, ++pair) {
      if (cross[pair] != 0.0 || jkl[pair] != 0.0) {
        cfg.system.couplings.push_back({int(p), int(q), jkl[pair], cross[pair]});
      }
    }
  }
  const int dim = cfg.system.dim();

  // ---- time grid and pulses
  if (const auto d = r.duration("duration")) {
    if (d->second.size() != 1 || !(d->second.front() > 0.0)) {
      r.fail(d->first, "duration must be a single positive value");
    }
    cfg.duration = d->second.front();
  }
  if (r.has("ntime") && r.raw("ntime") != "auto") {
    const long long n = r.integer("ntime", 0);
    if (n < 1) r.fail("ntime", "ntime must be positive or 'auto'");
    cfg.n_steps = static_cast<int>(n);
  }
  cfg.timestep_options.samples_per_period = r.number("samples_per_period", 20.0);
  cfg.timestep_options.floor = static_cast<int>(r.integer("ntime_floor", 100));
  cfg.n_splines = static_cast<int>(r.integer("nsplines", 10));
  if (cfg.n_splines < 3) r.fail("nsplines", "nsplines must be at least 3");

  const std::string carrier_key = r.has("carrier_ghz") ? "carrier_ghz" : "carrier_mhz";
  if (r.has("carrier_ghz") && r.has("carrier_mhz")) r.fail("carrier_mhz", "carrier given in both GHz and MHz");
  if (r.has(carrier_key)) {
    const double factor = carrier_key == "carrier_ghz" ? kTwoPi : kTwoPi * 1e-3;
    std::vector<std::vector<double>> groups;
    for (const auto& group : split(r.raw(carrier_key), ';')) {
      std::vector<double> freqs;
      for (const auto& tok : split(group, ',')) freqs.push_back(factor * r.to_double(carrier_key, tok));
      groups.push_back(std::move(freqs));
    }
    if (groups.size() == 1) {
      cfg.carriers.assign(nsub, groups.front());
    } else if (groups.size() == nsub) {
      cfg.carriers = std::move(groups);
      for (const auto& g : cfg.carriers) {
        if (g.size() != cfg.carriers.front().size()) {
          r.fail(carrier_key, "every subsystem needs the same number of carriers");
        }
      }
    } else {
      r.fail(carrier_key, "carrier groups must be one shared list or one list per subsystem");
    }
  } else {
    cfg.carriers.assign(nsub, {0.0});
  }

  // ---- objective
  auto& obj = cfg.objective;
  if (r.has("merit")) {
    const auto& m = r.raw("merit");
    if (m == "frobenius") obj.merit = Merit::Frobenius;
    else if (m == "trace") obj.merit = Merit::Trace;
    else if (m == "measure") obj.merit = Merit::Measure;
    else r.fail("merit", "merit must be frobenius, trace, or measure");
  }
  const std::string initial = r.has("initial") ? r.raw("initial") : "state:0";
  if (initial == "fullbasis") obj.initial_set = InitialSet::FullBasis;
  else if (initial == "ensemble") obj.initial_set = InitialSet::Ensemble;
  else if (initial == "threestates") obj.initial_set = InitialSet::ThreeStates;
  else {
    obj.initial_set = InitialSet::Single;
    obj.single_state = parse_state(r, "initial", initial, dim);
  }
  if (obj.initial_set == InitialSet::ThreeStates && dim < 2) {
    r.fail("initial", "threestates needs a Hilbert space of dimension >= 2");
  }
  if (r.has("target") && r.raw("target") != "none") {
    cfg.has_target = true;
    const std::string t = r.raw("target");
    if (t == "gate:cnot") {
      obj.target = TargetSpec::unitary(cnot_gate());
    } else if (t == "gate:swap14") {
      obj.target = TargetSpec::unitary(swap14_gate());
    } else if (t.rfind("gate:file:", 0) == 0) {
      std::filesystem::path p(t.substr(10));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      try {
        obj.target = TargetSpec::unitary(load_gate_file(p.string()));
      } catch (const InvalidSpec& e) {
        r.fail("target", e.what());
      }
    } else if (t.rfind("level:", 0) == 0) {
      obj.target = TargetSpec::pure_level(parse_index(r, "target", t.substr(6)));
      if (obj.target.level >= dim) r.fail("target", "target level out of range");
    } else {
      obj.target = TargetSpec::fixed_state(parse_state(r, "target", t, dim));
    }
    if (obj.target.kind == TargetSpec::Kind::Gate && obj.target.gate.rows() != dim) {
      r.fail("target", "gate dimension " + std::to_string(obj.target.gate.rows()) +
                           " does not match the system dimension " + std::to_string(dim));
    }
    if (obj.merit == Merit::Measure && obj.target.kind != TargetSpec::Kind::PureLevel) {
      r.fail("merit", "the measure merit needs a target of the form level:<m>");
    }
  } else if (obj.merit == Merit::Measure) {
    r.fail("merit", "the measure merit needs a target of the form level:<m>");
  }
  if (r.has("weights")) {
    obj.weights = r.list("weights");
    const std::size_t expected = obj.initial_set == InitialSet::FullBasis ? std::size_t(dim) * dim
                                 : obj.initial_set == InitialSet::ThreeStates ? 3
                                                                                : 1;
    if (obj.weights.size() != expected) {
      r.fail("weights", "expected " + std::to_string(expected) + " weights, got " +
                            std::to_string(obj.weights.size()));
    }
    for (double w : obj.weights) {
      if (!(w > 0.0)) r.fail("weights", "weights must be strictly positive");
    }
  }
  obj.gamma1 = r.number("gamma_penalty", 0.0);
  obj.gamma2 = r.number("gamma_tikhonov", 0.0);
  if (obj.gamma1 < 0.0) r.fail("gamma_penalty", "gamma_penalty must be nonnegative");
  if (obj.gamma2 < 0.0) r.fail("gamma_tikhonov", "gamma_tikhonov must be nonnegative");
  if (const auto w = r.duration("penalty_width")) {
    if (w->second.size() != 1 || !(w->second.front() > 0.0)) r.fail(w->first, "penalty width must be positive");
    obj.penalty_width = w->second.front();
  }

  // ---- optimizer and solver
  auto& opt = cfg.optimizer;
  opt.max_iters = static_cast<int>(r.integer("optim_maxiter", opt.max_iters));
  opt.memory = static_cast<int>(r.integer("optim_memory", opt.memory));
  opt.grad_tol = r.number("optim_gradtol", opt.grad_tol);
  opt.grad_tol_relative = r.boolean("optim_gradtol_relative", opt.grad_tol_relative);
  opt.obj_tol = r.number("optim_objtol", opt.obj_tol);
  try {
    opt.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(origin, 0, e.what());
  }
  cfg.solver.gmres_tol = r.number("gmres_tol", cfg.solver.gmres_tol);
  cfg.solver.gmres_max_iter = static_cast<int>(r.integer("gmres_maxiter", cfg.solver.gmres_max_iter));
  cfg.solver.store_stages = r.boolean("store_stages", cfg.solver.store_stages);
  if (!(cfg.solver.gmres_tol > 0.0)) r.fail("gmres_tol", "gmres_tol must be positive");
  if (cfg.solver.gmres_max_iter < 1) r.fail("gmres_maxiter", "gmres_maxiter must be positive");

  cfg.init_amplitude = r.number("init_amplitude", 0.0);
  cfg.init_constant = r.number("init_constant", 0.0);
  if (cfg.init_amplitude < 0.0) r.fail("init_amplitude", "init_amplitude must be nonnegative");
  const long long seed = r.integer("seed", 1);
  if (seed < 0) r.fail("seed", "seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.workers = static_cast<int>(r.integer("workers", 1));
  if (cfg.workers < 1) r.fail("workers", "workers must be at least 1");
  if (r.has("fd_steps")) {
    cfg.fd_steps = r.list("fd_steps");
    for (double h : cfg.fd_steps) {
      if (!(h > 0.0)) r.fail("fd_steps", "finite-difference steps must be positive");
    }
  }

  try {
    cfg.system.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(origin, 0, e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config_text(buffer.str(), path, dir.empty() ? "." : dir.string());
}

}  // namespace oqc
