#include "oqc/objectives.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace oqc {

double merit_vectorized(Merit merit, const CVector& target, int level, const CVector& q,
                        int dim) {
  switch (merit) {
    case Merit::Frobenius:
      return 0.5 * (q - target).squaredNorm();
    case Merit::Trace:
      return 1.0 - std::real(target.dot(q));
    case Merit::Measure: {
      double acc = 0.0;
      for (int l = 0; l < dim; ++l) {
        acc += double(std::abs(l - level)) * std::real(q[Eigen::Index(l) * (dim + 1)]);
      }
      return acc;
    }
  }
  return 0.0;
}

CVector merit_gradient_vectorized(Merit merit, const CVector& target, int level,
                                  const CVector& q, int dim) {
  switch (merit) {
    case Merit::Frobenius:
      return q - target;
    case Merit::Trace:
      return -target;
    case Merit::Measure: {
      CVector g = CVector::Zero(q.size());
      for (int l = 0; l < dim; ++l) g[Eigen::Index(l) * (dim + 1)] = double(std::abs(l - level));
      return g;
    }
  }
  return CVector::Zero(q.size());
}

CMatrix basis_state(int k, int j, int dim) {
  if (k < 0 || j < 0 || k >= dim || j >= dim) throw InvalidSpec("basis_state: index out of range");
  CMatrix b = CMatrix::Zero(dim, dim);
  if (k == j) {
    b(k, k) = 1.0;
    return b;
  }
  b(k, k) = 0.5;
  b(j, j) = 0.5;
  if (k < j) {
    b(k, j) = 0.5;
    b(j, k) = 0.5;
  } else {
    // (i/2)(|j><k| - |k><j|)
    b(j, k) = Complex(0.0, 0.5);
    b(k, j) = Complex(0.0, -0.5);
  }
  return b;
}

CMatrix ensemble_state(int dim) {
  if (dim < 1) throw InvalidSpec("ensemble_state: dimension must be positive");
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int j = 0; j < dim; ++j) rho += basis_state(k, j, dim);
  }
  return rho / double(dim) / double(dim);
}

std::array<CMatrix, 3> three_states(int dim) {
  if (dim < 2) throw InvalidSpec("three_states needs dimension >= 2");
  std::array<CMatrix, 3> out;
  out[0] = CMatrix::Zero(dim, dim);
  const double norm = double(dim) * double(dim + 1);
  for (int j = 0; j < dim; ++j) out[0](j, j) = 2.0 * double(dim - j) / norm;
  out[1] = CMatrix::Constant(dim, dim, Complex(1.0 / dim));
  out[2] = CMatrix::Identity(dim, dim) / double(dim);
  return out;
}

CMatrix pure_basis_state(int k, int dim) {
  if (k < 0 || k >= dim) throw InvalidSpec("basis level " + std::to_string(k) + " out of range");
  CMatrix rho = CMatrix::Zero(dim, dim);
  rho(k, k) = 1.0;
  return rho;
}

CMatrix pure_superposition(const std::vector<int>& levels, int dim) {
  if (levels.empty()) throw InvalidSpec("superposition needs at least one level");
  CVector psi = CVector::Zero(dim);
  for (int k : levels) {
    if (k < 0 || k >= dim) throw InvalidSpec("level " + std::to_string(k) + " out of range");
    psi[k] = 1.0;
  }
  psi.normalize();
  return psi * psi.adjoint();
}

CMatrix gate_target(const CMatrix& v, const CMatrix& rho0) {
  if (v.rows() != v.cols() || v.rows() != rho0.rows()) {
    throw InvalidSpec("gate dimension does not match the state");
  }
  if ((v.adjoint() * v - CMatrix::Identity(v.rows(), v.cols())).norm() > 1e-10) {
    throw InvalidSpec("gate matrix is not unitary");
  }
  return v * rho0 * v.adjoint();
}

CMatrix cnot_gate() {
  CMatrix v = CMatrix::Zero(4, 4);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  v(3, 2) = 1.0;
  v(2, 3) = 1.0;
  return v;
}

CMatrix swap14_gate() {
  CMatrix v = CMatrix::Zero(16, 16);
  for (int l = 0; l < 16; ++l) {
    const int first = (l >> 3) & 1;
    const int last = l & 1;
    const int image = (l & 0b0110) | (last << 3) | first;
    v(image, l) = 1.0;
  }
  return v;
}

namespace {

Complex parse_complex_token(const std::string& token) {
  auto fail = [&]() -> Complex { throw InvalidSpec("malformed complex entry '" + token + "'"); };
  if (token.empty()) return fail();
  const char last = token.back();
  auto to_double = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(s, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != s.size()) fail();
    return value;
  };
  if (last != 'j' && last != 'i') return {to_double(token), 0.0};
  const std::string body = token.substr(0, token.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

}  // namespace

CMatrix parse_gate_text(const std::string& text) {
  std::vector<std::vector<Complex>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<Complex> row;
    std::string token;
    while (tokens >> token) row.push_back(parse_complex_token(token));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  if (n == 0) throw InvalidSpec("gate file is empty");
  CMatrix v(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) throw InvalidSpec("gate matrix must be square");
    for (std::size_t c = 0; c < n; ++c) v(r, c) = rows[r][c];
  }
  return v;
}

CMatrix load_gate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open gate file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_gate_text(buffer.str());
}

double penalty_weight(double t, double duration, double width) {
  if (!(width > 0.0)) throw InvalidSpec("penalty width must be positive");
  const double x = (t - duration) / width;
  return std::exp(-x * x) / width;
}

std::vector<CMatrix> initial_states(const ObjectiveSpec& objective, int dim) {
  switch (objective.initial_set) {
    case InitialSet::Single:
      if (objective.single_state.rows() != dim || objective.single_state.cols() != dim) {
        throw InvalidSpec("initial state dimension does not match the system");
      }
      return {objective.single_state};
    case InitialSet::FullBasis: {
      std::vector<CMatrix> out;
      out.reserve(std::size_t(dim) * dim);
      for (int k = 0; k < dim; ++k) {
        for (int j = 0; j < dim; ++j) out.push_back(basis_state(k, j, dim));
      }
      return out;
    }
    case InitialSet::Ensemble:
      return {ensemble_state(dim)};
    case InitialSet::ThreeStates: {
      auto s = three_states(dim);
      return {s[0], s[1], s[2]};
    }
  }
  return {};
}

CMatrix target_state(const TargetSpec& target, const CMatrix& rho0, int dim) {
  switch (target.kind) {
    case TargetSpec::Kind::FixedState:
      if (target.state.rows() != dim || target.state.cols() != dim) {
        throw InvalidSpec("target state dimension does not match the system");
      }
      return target.state;
    case TargetSpec::Kind::Gate:
      return gate_target(target.gate, rho0);
    case TargetSpec::Kind::PureLevel:
      return pure_basis_state(target.level, dim);
  }
  return {};
}

std::vector<double> default_weights(InitialSet set, std::size_t count) {
  if (set == InitialSet::ThreeStates && count == 3) return {20.0, 1.0, 1.0};
  return std::vector<double>(count, 1.0);
}

double von_neumann_entropy(const CMatrix& rho, int dim) {
  if (rho.rows() != rho.cols()) throw InvalidSpec("entropy: matrix must be square");
  if ((rho - rho.adjoint()).norm() > 1e-10 * std::max(1.0, rho.norm())) {
    throw InvalidSpec("entropy: matrix is not Hermitian");
  }
  if (dim <= 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double lambda = eig.eigenvalues()[k];
    if (lambda > 1e-14) s -= lambda * std::log(lambda);
  }
  return s / std::log(double(dim));
}

ExpectedEnergy expected_energy(const CMatrix& rho, const SystemSpec& spec) {
  const int n = spec.dim();
  if (rho.rows() != n) throw InvalidSpec("expected_energy: dimension mismatch");
  ExpectedEnergy out;
  out.per_subsystem.assign(std::size_t(spec.num_subsystems()), 0.0);
  for (int l = 0; l < n; ++l) {
    const double p = std::real(rho(l, l));
    out.total += double(l) * p;
    for (int q = 0; q < spec.num_subsystems(); ++q) out.per_subsystem[q] += spec.level_of(l, q) * p;
  }
  return out;
}

std::vector<std::vector<double>> populations(const CMatrix& rho, const SystemSpec& spec) {
  const int n = spec.dim();
  if (rho.rows() != n) throw InvalidSpec("populations: dimension mismatch");
  std::vector<std::vector<double>> out;
  for (const auto& s : spec.subsystems) out.emplace_back(std::size_t(s.n_levels), 0.0);
  for (int l = 0; l < n; ++l) {
    const double p = std::real(rho(l, l));
    for (int q = 0; q < spec.num_subsystems(); ++q) out[q][spec.level_of(l, q)] += p;
  }
  return out;
}

}  // namespace oqc
