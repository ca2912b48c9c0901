#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oqc/adjoint.hpp"

using namespace oqc;
using namespace testing;

namespace {

const SolverConfig tight{1e-14, 200, true};

SystemSpec open_qubit() {
  SystemSpec s;
  s.subsystems.push_back({2, 1.1, 0.0, 1.0, 12.0, 7.0});
  return s;
}

SystemSpec trivial_system() {
  SystemSpec s;
  s.subsystems.push_back({1, 1.0, 0.0, 1.0, 0, 0});
  return s;
}

ControlVector random_controls(const ControlLayout& layout, unsigned seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  ControlVector alpha(layout);
  for (auto& v : alpha.values()) v = u(rng);
  return alpha;
}

}  // namespace

TEST_SUITE("adjoint") {
  const PulseBasis basis{{4.0, 4}, {{{0.0}}}};

  TEST_CASE("zero terminal sensitivity gives a zero adjoint") {
    const Lindbladian model(open_qubit());
    const auto alpha = random_controls(basis.layout(), 1);
    const auto traj = forward_solve(model, alpha, basis, {4.0, 20}, vec(pure_basis_state(0, 2)), tight);
    const auto adj = backward_solve(model, traj, alpha, basis, {CVector::Zero(4), {}}, tight);
    for (const auto& q : adj.states) CHECK(q.norm() == 0.0);
  }

  TEST_CASE("closed constant generator: backward sweep inverts the forward Cayley map") {
    SystemSpec s;
    s.subsystems.push_back({2, 1.4, 0.0, 1.0, 0, 0});
    const Lindbladian model(s);
    ControlVector alpha(basis.layout());
    for (int k = 0; k < basis.grid.n_splines; ++k) alpha.set_coefficient(0, k, 0, Complex(0.3, -0.2));
    const TimeGrid grid{4.0, 16};
    const auto traj = forward_solve(model, alpha, basis, grid, vec(pure_basis_state(0, 2)), tight);
    std::mt19937_64 rng(2);
    const CVector terminal = random_matrix(4, rng).col(0);
    const auto adj = backward_solve(model, traj, alpha, basis, {terminal, {}}, tight);
    const std::vector<Complex> drive{Complex(0.3, -0.2)};
    const SparseCMatrix m = model.assemble(drive, 0.0);
    CVector q = adj.states.front();
    for (int j = 0; j < grid.n_steps; ++j) q = imr_step(q, m, grid.step(), tight).next;
    CHECK((q - terminal).norm() <= 1e-12 * terminal.norm());
  }

  TEST_CASE("duality bookkeeping with running sources") {
    const Lindbladian model(open_qubit());
    const auto alpha = random_controls(basis.layout(), 3);
    const TimeGrid grid{4.0, 30};
    const auto traj = forward_solve(model, alpha, basis, grid, vec(pure_basis_state(1, 2)), tight);
    std::mt19937_64 rng(4);
    const CVector terminal = random_matrix(4, rng).col(0);
    std::vector<CVector> src;
    for (int j = 0; j < grid.n_steps; ++j) src.push_back(random_matrix(4, rng).col(0) * 0.1);
    AdjointSources sources{terminal, [&](int j, const CVector&) { return src[std::size_t(j)]; }};
    const auto adj = backward_solve(model, traj, alpha, basis, sources, tight);
    Complex contributions = 0.0;
    for (int j = 0; j < grid.n_steps; ++j) contributions += src[std::size_t(j)].dot(traj.states[std::size_t(j)]);
    const Complex lhs = adj.states.back().dot(traj.states.back()) - adj.states.front().dot(traj.states.front());
    CHECK(std::abs(lhs + contributions) <= 1e-12);
  }

  TEST_CASE("Tikhonov-only gradients") {
    ObjectiveSpec obj;
    obj.single_state = CMatrix::Identity(1, 1);
    obj.target = TargetSpec::fixed_state(CMatrix::Identity(1, 1));
    obj.gamma2 = 1.0;
    const ControlProblem p(trivial_system(), basis, {4.0, 10}, obj);
    const auto alpha = random_controls(p.layout(), 5);
    CHECK((objective_gradient(p, alpha).gradient - alpha.values()).norm() == 0.0);
    CHECK(gradient_fd_check(p, alpha).max_relative_error <= 1e-10);

    obj.gamma2 = 5.0;
    const ControlProblem p5(trivial_system(), basis, {4.0, 10}, obj);
    CHECK(objective_gradient(p5, ControlVector(p5.layout())).gradient.norm() == 0.0);
  }

  TEST_CASE("finite-difference agreement on small open problems") {
    ObjectiveSpec obj;
    obj.single_state = pure_basis_state(0, 2);
    obj.target = TargetSpec::fixed_state(pure_basis_state(1, 2));
    SUBCASE("Frobenius state transfer") {}
    SUBCASE("with the time-integrated penalty") {
      obj.gamma1 = 0.5;
      obj.penalty_width = 1.0;
    }
    SUBCASE("trace merit, penalty, and Tikhonov") {
      obj.merit = Merit::Trace;
      obj.gamma1 = 0.3;
      obj.gamma2 = 0.01;
    }
    for (int steps : {20, 4}) {  // agreement must not degrade with a coarse grid
      const ControlProblem p(open_qubit(), basis, {4.0, steps}, obj, tight);
      const auto report = gradient_fd_check(p, random_controls(p.layout(), 6));
      CHECK(report.max_relative_error <= 1e-6);
    }
  }

  TEST_CASE("stored and recomputed stages give the same gradient") {
    ObjectiveSpec obj;
    obj.single_state = pure_basis_state(0, 2);
    obj.target = TargetSpec::fixed_state(pure_basis_state(1, 2));
    const ControlProblem stored(open_qubit(), basis, {4.0, 20}, obj, tight);
    SolverConfig lean = tight;
    lean.store_stages = false;
    const ControlProblem recomputed(open_qubit(), basis, {4.0, 20}, obj, lean);
    const auto alpha = random_controls(stored.layout(), 7);
    const RVector a = objective_gradient(stored, alpha).gradient;
    const RVector b = objective_gradient(recomputed, alpha).gradient;
    CHECK((a - b).norm() <= 1e-14 * a.norm());
  }

  TEST_CASE("gradient of a weighted sum is the weighted sum of gradients") {
    ObjectiveSpec obj;
    obj.initial_set = InitialSet::ThreeStates;
    obj.target = TargetSpec::fixed_state(pure_basis_state(1, 2));
    obj.gamma1 = 0.2;
    const ControlProblem multi(open_qubit(), basis, {4.0, 20}, obj, tight);
    const auto alpha = random_controls(multi.layout(), 8);
    const auto states = three_states(2);
    RVector sum = RVector::Zero(multi.layout().size());
    double value = 0.0;
    for (int i = 0; i < 3; ++i) {
      ObjectiveSpec single = obj;
      single.initial_set = InitialSet::Single;
      single.single_state = states[std::size_t(i)];
      const ControlProblem p(open_qubit(), basis, {4.0, 20}, single, tight);
      const auto r = objective_gradient(p, alpha);
      sum += multi.weight(std::size_t(i)) * r.gradient;
      value += multi.weight(std::size_t(i)) * r.value.total;
    }
    const auto whole = objective_gradient(multi, alpha);
    CHECK((whole.gradient - sum).norm() <= 1e-14 * sum.norm());
    CHECK(whole.value.total == doctest::Approx(value).epsilon(1e-14));
  }

  TEST_CASE("mismatched layouts are rejected") {
    ObjectiveSpec obj;
    obj.single_state = pure_basis_state(0, 2);
    obj.target = TargetSpec::fixed_state(pure_basis_state(1, 2));
    const ControlProblem p(open_qubit(), basis, {4.0, 20}, obj);
    CHECK_THROWS_AS(objective_gradient(p, ControlVector(ControlLayout{1, 5, 1})), InvalidSpec);
  }
}
