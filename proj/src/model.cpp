#include "oqc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace oqc {

namespace {

SparseCMatrix identity(int n) {
  SparseCMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseCMatrix local_lowering(int n) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int k = 0; k + 1 < n; ++k) entries.emplace_back(k, k + 1, std::sqrt(double(k + 1)));
  SparseCMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

SparseCMatrix kron(const SparseCMatrix& a, const SparseCMatrix& b) {
  SparseCMatrix out = Eigen::kroneckerProduct(a, b);
  out.makeCompressed();
  return out;
}

SparseCMatrix lift(const SystemSpec& spec, int q, const SparseCMatrix& local) {
  SparseCMatrix out = identity(1);
  for (int k = 0; k < spec.num_subsystems(); ++k) {
    out = kron(out, k == q ? local : identity(spec.subsystems[k].n_levels));
  }
  return out;
}

SparseCMatrix jc_exchange(const SparseCMatrix& ap, const SparseCMatrix& aq) {
  // a_p^dag a_q
  SparseCMatrix x = ap.adjoint() * aq;
  return x;
}

}  // namespace

int SystemSpec::dim() const {
  int n = 1;
  for (const auto& s : subsystems) n *= s.n_levels;
  return n;
}

int SystemSpec::level_of(int l, int q) const {
  int stride = 1;
  for (int k = num_subsystems() - 1; k > q; --k) stride *= subsystems[k].n_levels;
  return (l / stride) % subsystems[q].n_levels;
}

void SystemSpec::validate() const {
  if (subsystems.empty()) throw InvalidSpec("system has no subsystems");
  for (std::size_t k = 0; k < subsystems.size(); ++k) {
    if (subsystems[k].n_levels < 1) {
      throw InvalidSpec("subsystem " + std::to_string(k) + " needs at least one level");
    }
  }
  const int nsub = num_subsystems();
  std::vector<char> seen(std::size_t(nsub) * std::size_t(nsub), 0);
  for (const auto& c : couplings) {
    if (c.p < 0 || c.q >= nsub || c.p >= c.q) {
      throw InvalidSpec("invalid coupling pair (" + std::to_string(c.p) + ", " +
                        std::to_string(c.q) + ")");
    }
    char& flag = seen[std::size_t(c.p) * nsub + c.q];
    if (flag) {
      throw InvalidSpec("duplicate coupling pair (" + std::to_string(c.p) + ", " +
                        std::to_string(c.q) + ")");
    }
    flag = 1;
  }
}

SparseCMatrix build_lowering(const SystemSpec& spec, int q) {
  if (q < 0 || q >= spec.num_subsystems()) {
    throw InvalidSpec("subsystem index " + std::to_string(q) + " out of range");
  }
  return lift(spec, q, local_lowering(spec.subsystems[q].n_levels));
}

SparseCMatrix build_number(const SystemSpec& spec, int q) {
  SparseCMatrix a = build_lowering(spec, q);
  SparseCMatrix n = a.adjoint() * a;
  return n;
}

SparseCMatrix build_system_hamiltonian(const SystemSpec& spec) {
  spec.validate();
  const int n = spec.dim();
  SparseCMatrix h(n, n);
  std::vector<SparseCMatrix> a;
  std::vector<SparseCMatrix> num;
  for (int q = 0; q < spec.num_subsystems(); ++q) {
    a.push_back(build_lowering(spec, q));
    num.push_back(SparseCMatrix(a.back().adjoint() * a.back()));
  }
  for (int q = 0; q < spec.num_subsystems(); ++q) {
    const auto& s = spec.subsystems[q];
    SparseCMatrix kerr = num[q] * num[q];
    kerr -= num[q];  // a^dag a^dag a a
    h += Complex(s.omega - s.omega_rot) * num[q] - Complex(0.5 * s.xi_self) * kerr;
  }
  for (const auto& c : spec.couplings) {
    SparseCMatrix nn = num[c.p] * num[c.q];
    h -= Complex(c.xi_cross) * nn;
    if (c.g_jc != 0.0 &&
        spec.subsystems[c.p].omega_rot == spec.subsystems[c.q].omega_rot) {
      SparseCMatrix x = jc_exchange(a[c.p], a[c.q]);
      SparseCMatrix xt = x.adjoint();
      h += Complex(c.g_jc) * (x + xt);
    }
  }
  h.prune(Complex(0.0));
  h.makeCompressed();
  return h;
}

SparseCMatrix number_operator(int dim, int m) {
  if (m < 0 || m >= dim) {
    throw InvalidSpec("target level " + std::to_string(m) + " out of range");
  }
  SparseCMatrix op(dim, dim);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int l = 0; l < dim; ++l) {
    if (l != m) entries.emplace_back(l, l, double(std::abs(l - m)));
  }
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

SparseCMatrix commutator_superoperator(const SparseCMatrix& hamiltonian) {
  const int n = static_cast<int>(hamiltonian.rows());
  const SparseCMatrix id = identity(n);
  SparseCMatrix ht = hamiltonian.transpose();
  SparseCMatrix out = kron(id, hamiltonian) - kron(ht, id);
  return Complex(0.0, -1.0) * out;
}

SparseCMatrix dissipator_superoperator(const SparseCMatrix& collapse) {
  const int n = static_cast<int>(collapse.rows());
  const SparseCMatrix id = identity(n);
  SparseCMatrix ldl = collapse.adjoint() * collapse;
  SparseCMatrix ldl_t = ldl.transpose();
  SparseCMatrix conj = collapse.conjugate();
  SparseCMatrix out = kron(conj, collapse) - 0.5 * (kron(id, ldl) + kron(ldl_t, id));
  return out;
}

Lindbladian::Lindbladian(SystemSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  dim_ = spec_.dim();
  system_hamiltonian_ = build_system_hamiltonian(spec_);
  const int nsub = spec_.num_subsystems();
  for (int q = 0; q < nsub; ++q) lowering_.push_back(build_lowering(spec_, q));

  SparseCMatrix base = commutator_superoperator(system_hamiltonian_);
  for (int q = 0; q < nsub; ++q) {
    const auto& s = spec_.subsystems[q];
    if (s.t_decay > 0.0) {
      base += dissipator_superoperator(SparseCMatrix(lowering_[q] / std::sqrt(s.t_decay)));
      closed_ = false;
    }
    if (s.t_dephase > 0.0) {
      SparseCMatrix n = lowering_[q].adjoint() * lowering_[q];
      base += dissipator_superoperator(SparseCMatrix(n / std::sqrt(s.t_dephase)));
      closed_ = false;
    }
  }

  for (int q = 0; q < nsub; ++q) {
    SparseCMatrix adag = lowering_[q].adjoint();
    SparseCMatrix x = lowering_[q] + adag;
    SparseCMatrix y = kI * (lowering_[q] - adag);
    drive_re_.push_back(commutator_superoperator(x));
    drive_im_.push_back(commutator_superoperator(y));
  }

  std::vector<std::pair<SparseCMatrix, SparseCMatrix>> coupling_terms;
  for (const auto& c : spec_.couplings) {
    const double eta = spec_.subsystems[c.p].omega_rot - spec_.subsystems[c.q].omega_rot;
    if (c.g_jc == 0.0 || eta == 0.0) continue;
    SparseCMatrix x = jc_exchange(lowering_[c.p], lowering_[c.q]);
    SparseCMatrix xt = x.adjoint();
    TimeDependentCoupling td;
    td.eta = eta;
    td.hamiltonian_cos = Complex(c.g_jc) * (x + xt);
    td.hamiltonian_sin = Complex(0.0, c.g_jc) * (x - xt);
    coupling_terms.emplace_back(commutator_superoperator(td.hamiltonian_cos),
                                commutator_superoperator(td.hamiltonian_sin));
    couplings_.push_back(std::move(td));
  }

  // Union sparsity pattern. Unit weights never cancel, so every structural entry survives.
  std::vector<Eigen::Triplet<Complex>> entries;
  auto collect = [&](const SparseCMatrix& m) {
    for (int r = 0; r < m.outerSize(); ++r) {
      for (SparseCMatrix::InnerIterator it(m, r); it; ++it) {
        entries.emplace_back(int(it.row()), int(it.col()), 1.0);
      }
    }
  };
  collect(base);
  for (int q = 0; q < nsub; ++q) {
    collect(drive_re_[q]);
    collect(drive_im_[q]);
  }
  for (const auto& [c, s] : coupling_terms) {
    collect(c);
    collect(s);
  }
  pattern_.resize(vec_dim(), vec_dim());
  pattern_.setFromTriplets(entries.begin(), entries.end());
  pattern_.makeCompressed();

  base_ = aligned_values(base);
  for (int q = 0; q < nsub; ++q) {
    drive_re_values_.push_back(aligned_values(drive_re_[q]));
    drive_im_values_.push_back(aligned_values(drive_im_[q]));
  }
  for (std::size_t k = 0; k < couplings_.size(); ++k) {
    couplings_[k].cos_part = aligned_values(coupling_terms[k].first);
    couplings_[k].sin_part = aligned_values(coupling_terms[k].second);
  }
}

std::vector<Complex> Lindbladian::aligned_values(const SparseCMatrix& term) const {
  std::vector<Complex> out(pattern_.nonZeros(), Complex(0.0));
  const auto* outer = pattern_.outerIndexPtr();
  const auto* inner = pattern_.innerIndexPtr();
  for (int r = 0; r < term.outerSize(); ++r) {
    for (SparseCMatrix::InnerIterator it(term, r); it; ++it) {
      const auto* begin = inner + outer[r];
      const auto* end = inner + outer[r + 1];
      const auto* pos = std::lower_bound(begin, end, static_cast<int>(it.col()));
      out[std::size_t(pos - inner)] += it.value();
    }
  }
  return out;
}

SparseCMatrix Lindbladian::hamiltonian(std::span<const Complex> drive, double t) const {
  if (static_cast<int>(drive.size()) != spec_.num_subsystems()) {
    throw InvalidSpec("drive needs one amplitude per subsystem");
  }
  SparseCMatrix h = system_hamiltonian_;
  for (const auto& c : couplings_) {
    h += std::cos(c.eta * t) * c.hamiltonian_cos + std::sin(c.eta * t) * c.hamiltonian_sin;
  }
  for (int q = 0; q < spec_.num_subsystems(); ++q) {
    SparseCMatrix adag = lowering_[q].adjoint();
    h += drive[q] * lowering_[q] + std::conj(drive[q]) * adag;
  }
  return h;
}

SparseCMatrix Lindbladian::assemble(std::span<const Complex> drive, double t) const {
  if (static_cast<int>(drive.size()) != spec_.num_subsystems()) {
    throw InvalidSpec("drive needs one amplitude per subsystem");
  }
  SparseCMatrix m = pattern_;
  Complex* values = m.valuePtr();
  const std::size_t nnz = base_.size();
  std::copy(base_.begin(), base_.end(), values);
  for (int q = 0; q < spec_.num_subsystems(); ++q) {
    const double re = drive[q].real();
    const double im = drive[q].imag();
    const auto& vr = drive_re_values_[q];
    const auto& vi = drive_im_values_[q];
    for (std::size_t k = 0; k < nnz; ++k) values[k] += re * vr[k] + im * vi[k];
  }
  for (const auto& c : couplings_) {
    const double cs = std::cos(c.eta * t);
    const double sn = std::sin(c.eta * t);
    for (std::size_t k = 0; k < nnz; ++k) values[k] += cs * c.cos_part[k] + sn * c.sin_part[k];
  }
  return m;
}

SparseCMatrix assemble_superoperator(const SystemSpec& spec, std::span<const Complex> drive,
                                     double t) {
  return Lindbladian(spec).assemble(drive, t);
}

CVector vec(const CMatrix& rho) {
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvec(const CVector& q, int dim) {
  if (q.size() != Eigen::Index(dim) * dim) throw InvalidSpec("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(q.data(), dim, dim);
}

}  // namespace oqc
