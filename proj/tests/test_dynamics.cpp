#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rydsim/dynamics.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/measures.hpp"
#include "rydsim/model.hpp"
#include "test_support.hpp"

using namespace rydsim;
using rydsim::testing::max_abs;
using rydsim::testing::random_density;
using rydsim::testing::random_hermitian;
using rydsim::testing::random_matrix;

namespace {

// Two-level system |g> = 0, |e> = 1 with decay e -> g.
ModelSystem two_level(double gamma, double rabi = 0.0) {
  ModelSystem m;
  m.hamiltonian = ComplexMatrix::Zero(2, 2);
  m.hamiltonian(0, 1) = m.hamiltonian(1, 0) = rabi;
  ComplexMatrix c = ComplexMatrix::Zero(2, 2);
  c(0, 1) = std::sqrt(gamma);
  m.collapse_ops = {c};
  m.dims = SubsystemDims({2});
  m.basis_labels = {{"g", "e"}};
  return m;
}

ModelSystem random_model(int d, int jumps, std::mt19937& rng) {
  ModelSystem m;
  m.hamiltonian = random_hermitian(d, rng);
  for (int k = 0; k < jumps; ++k) m.collapse_ops.push_back(random_matrix(d, d, rng) * 0.3);
  m.dims = SubsystemDims({d});
  std::vector<std::string> labels;
  for (int i = 0; i < d; ++i) labels.push_back(std::to_string(i));
  m.basis_labels = {labels};
  return m;
}

// Direct commutator + dissipator.
ComplexMatrix rhs_oracle(const ModelSystem& m, const ComplexMatrix& rho) {
  const Complex i(0.0, 1.0);
  ComplexMatrix out = -i * (m.hamiltonian * rho - rho * m.hamiltonian);
  for (const auto& c : m.collapse_ops) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

Observable excited() {
  return {"excited", [](const DensityMatrix& r) { return r.matrix()(1, 1).real(); }};
}

AtomParams fig1b() { return AtomParams{1.0, 1.0, 0.0, 0.0, 0.1515, 5e-5}; }

}  // namespace

TEST_CASE("lindblad_rhs basic cases") {
  ModelSystem zero;
  zero.hamiltonian = ComplexMatrix::Zero(3, 3);
  zero.dims = SubsystemDims({3});
  zero.basis_labels = {{"a", "b", "c"}};
  std::mt19937 rng(41);
  const ComplexMatrix rho = random_density(3, rng);
  CHECK(max_abs(lindblad_rhs(zero, rho)) == 0.0);

  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  CHECK(max_abs(lindblad_rhs(two_level(0.7), g)) < 1e-16);
  CHECK_THROWS_AS(lindblad_rhs(two_level(0.7), rho), DimensionError);
}

TEST_CASE("lindblad_rhs is traceless, Hermitian and matches the superoperator") {
  std::mt19937 rng(42);
  const ModelSystem m = random_model(4, 3, rng);
  const Liouvillian l = build_liouvillian(m);
  const LindbladKernel kernel(m);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix rho = random_density(4, rng);
    const ComplexMatrix r = lindblad_rhs(m, rho);
    CHECK(std::abs(r.trace()) < 1e-12);
    CHECK((r - r.adjoint()).norm() < 1e-12 * rho.norm() * std::max(1.0, r.norm()));
    CHECK(max_abs(r - rhs_oracle(m, rho)) < 1e-12);
    CHECK(max_abs(unvectorize(l.superop * vectorize(rho), 4) - r) < 1e-12);
    CHECK(max_abs(kernel(rho) - r) < 1e-12);
    // Non-Hermitian probes too: the map is linear on all matrices.
    const ComplexMatrix x = random_matrix(4, 4, rng);
    CHECK(max_abs(unvectorize(l.superop * vectorize(x), 4) - rhs_oracle(m, x)) < 1e-12);
    CHECK(max_abs(kernel(x) - rhs_oracle(m, x)) < 1e-12);
  }
  CHECK(kernel.norm_bound() >= norm1(l.superop) * (1 - 1e-12));
}

TEST_CASE("vectorization is column stacking") {
  ComplexMatrix a(2, 2);
  a << 1, 2, 3, 4;
  const ComplexVector v = vectorize(a);
  CHECK(v(1) == Complex(3.0));
  CHECK(v(2) == Complex(2.0));
  CHECK(max_abs(unvectorize(v, 2) - a) == 0.0);
}

TEST_CASE("Liouvillian spectra") {
  const double gamma = 0.8;
  const Liouvillian l = build_liouvillian(two_level(gamma));
  Eigen::ComplexEigenSolver<ComplexMatrix> es(l.superop);
  bool has_zero = false, has_gamma = false;
  for (int i = 0; i < 4; ++i) {
    has_zero |= std::abs(es.eigenvalues()(i)) < 1e-12;
    has_gamma |= std::abs(es.eigenvalues()(i) + gamma) < 1e-12;
  }
  CHECK(has_zero);
  CHECK(has_gamma);

  std::mt19937 rng(43);
  ModelSystem closed = random_model(3, 0, rng);
  Eigen::ComplexEigenSolver<ComplexMatrix> cs(build_liouvillian(closed).superop);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(cs.eigenvalues()(i).real()) < 1e-12);

  const ModelSystem m = random_model(5, 2, rng);
  const ComplexMatrix sl = build_liouvillian(m).superop;
  const ComplexVector id = vectorize(ComplexMatrix::Identity(5, 5));
  CHECK((id.adjoint() * sl).norm() < 1e-12);
}

TEST_CASE("Liouvillian dimension cap") {
  ModelSystem big;
  big.hamiltonian = ComplexMatrix::Zero(65, 65);
  big.dims = SubsystemDims({65});
  CHECK_THROWS_AS(build_liouvillian(big), DimensionError);
}

TEST_CASE("evolve with no dynamics keeps the state") {
  ModelSystem still;
  still.hamiltonian = ComplexMatrix::Zero(3, 3);
  still.dims = SubsystemDims({3});
  still.basis_labels = {{"a", "b", "c"}};
  std::mt19937 rng(44);
  const DensityMatrix rho0(random_density(3, rng), still.dims);
  const TimeSeries s = evolve(still, rho0, 5.0, 0.5, {});
  CHECK(s.times.size() == 11);
  CHECK(max_abs(s.final_state->matrix() - rho0.matrix()) < 1e-15);
}

TEST_CASE("two-level decay follows the exponential") {
  const double gamma = 0.37;
  const ModelSystem m = two_level(gamma);
  const DensityMatrix e = DensityMatrix::pure(StateVector::basis(2, 1), m.dims);
  const std::vector<Observable> obs{excited()};
  const TimeSeries s = evolve(m, e, 10.0, 0.25, obs);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    CHECK(std::abs(s.columns[0][i] - std::exp(-gamma * s.times[i])) < 1e-6);
  }
  CHECK(s.times.back() == doctest::Approx(10.0));
  CHECK(s.diagnostics.max_trace_drift < 1e-7);
}

TEST_CASE("sample grid with a trailing short step") {
  const ModelSystem m = two_level(0.5);
  const DensityMatrix e = DensityMatrix::pure(StateVector::basis(2, 1), m.dims);
  const std::vector<Observable> obs{excited()};
  const TimeSeries s = evolve(m, e, 1.05, 0.5, obs);
  REQUIRE(s.times.size() == 4);
  CHECK(s.times[3] == doctest::Approx(1.05));
  CHECK(s.columns[0][3] == doctest::Approx(std::exp(-0.5 * 1.05)).epsilon(1e-10));
  CHECK_THROWS_AS(evolve(m, e, -1.0, 0.5, obs), ConfigError);
  CHECK_THROWS_AS(evolve(m, e, 1.0, 0.0, obs), ConfigError);
}

TEST_CASE("single-atom dark-state pumping") {
  const ModelSystem m = build_single_atom(fig1b());
  const StateVector dark = single_atom_dark_state(1.0, 1.0);
  const DensityMatrix one = DensityMatrix::pure(StateVector::basis(4, single_atom::kGround1), m.dims);
  const std::vector<Observable> obs{{"dark", [dark](const DensityMatrix& r) { return population(r, dark); }}};
  const TimeSeries s = evolve(m, one, 1000.0, 5.0, obs);
  CHECK(s.columns[0].front() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.columns[0].back() > 0.99);
  CHECK(s.diagnostics.max_trace_drift < 1e-7);
}

TEST_CASE("exponential and adaptive RK paths agree on the 4-level model") {
  AtomParams p = fig1b();
  p.omega_mw = 0.05;
  p.delta = 0.3;
  const ModelSystem m = build_single_atom(p);
  const StateVector dark = single_atom_dark_state(p.omega1, p.omega2);
  const std::vector<Observable> obs{
      {"dark", [dark](const DensityMatrix& r) { return population(r, dark); }},
      {"purity", [](const DensityMatrix& r) { return purity(r); }},
      {"p", [](const DensityMatrix& r) { return r.matrix()(2, 2).real(); }}};
  const DensityMatrix one = DensityMatrix::pure(StateVector::basis(4, 1), m.dims);
  const TimeSeries a = evolve(m, one, 60.0, 0.5, obs);
  const TimeSeries b = evolve_rk(m, one, 60.0, 0.5, obs);
  REQUIRE(a.times.size() == b.times.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    for (std::size_t i = 0; i < a.times.size(); ++i) worst = std::max(worst, std::abs(a.columns[k][i] - b.columns[k][i]));
  }
  CHECK(worst < 1e-6);
  CHECK(b.diagnostics.propagation_steps > 0);
}

TEST_CASE("matrix-free propagation matches the dense exponential") {
  std::mt19937 rng(45);
  const ModelSystem m = random_model(5, 2, rng);
  const ComplexMatrix rho = random_density(5, rng);
  const LindbladKernel kernel(m);
  for (double t : {0.01, 0.3, 2.0}) {
    const ComplexMatrix dense = unvectorize(expm(build_liouvillian(m).superop * t) * vectorize(rho), 5);
    CHECK(max_abs(propagate_matrix_free(kernel, rho, t) - dense) < 1e-11);
  }
}

TEST_CASE("pulse schedules") {
  const PulseSchedule c = PulseSchedule::constant(2.0, 5.0);
  CHECK(c(0.0) == 2.0);
  CHECK(c(4.9) == 2.0);
  const PulseSchedule r = PulseSchedule::cosine_ramp(3.0, 10.0);
  CHECK(r(0.0) == doctest::Approx(3.0));
  CHECK(r(5.0) == doctest::Approx(3.0 * std::cos(std::numbers::pi / 4)));
  CHECK(r(10.0) == 0.0);
  CHECK(r(12.0) == 0.0);
}

TEST_CASE("constant schedule reproduces evolve") {
  AtomParams p = fig1b();
  p.omega_mw = 0.02;
  const ModelBuilder builder = [p](double o1) {
    AtomParams q = p;
    q.omega1 = o1;
    return build_single_atom(q);
  };
  const ModelSystem m = builder(p.omega1);
  const DensityMatrix one = DensityMatrix::pure(StateVector::basis(4, 1), m.dims);
  const TimeSeries a = evolve(m, one, 20.0, 1.0, {});
  const TimeSeries b = evolve_timedep(builder, PulseSchedule::constant(p.omega1, 20.0), one, 20.0, 1.0, {});
  CHECK(max_abs(a.final_state->matrix() - b.final_state->matrix()) < 1e-8);
}

TEST_CASE("slow closed-system ramp follows the instantaneous dark state") {
  // Closed ladder started in its dark state; Omega1 ramps down so the dark
  // state rotates from (|1> - |R>)/sqrt2 to |1>.
  const double o2 = 1.0;
  const ModelBuilder builder = [o2](double o1) {
    ModelSystem m;
    m.hamiltonian = ladder_hamiltonian(o1, o2, 0.0);
    m.dims = SubsystemDims({3});
    m.basis_labels = {{"1", "p", "R"}};
    return m;
  };
  ComplexVector d(3);
  d << 1.0, 0.0, -1.0;
  const DensityMatrix rho0 = DensityMatrix::pure(StateVector::normalize(d), SubsystemDims({3}));
  const std::vector<Observable> obs{{"one", [](const DensityMatrix& r) { return r.matrix()(0, 0).real(); }}};
  TimeDepOptions td;
  td.initial_subintervals = 4;
  const TimeSeries s = evolve_timedep(builder, PulseSchedule::cosine_ramp(1.0, 200.0), rho0, 200.0, 10.0, obs, td);
  CHECK(s.columns[0].back() > 0.999);
  CHECK(s.diagnostics.convergence_change < 1e-6);
}

TEST_CASE("time-dependent refinement gives up after the halving budget") {
  const ModelBuilder builder = [](double o1) {
    ModelSystem m;
    m.hamiltonian = ladder_hamiltonian(o1, 1.0, 0.0);
    m.dims = SubsystemDims({3});
    m.basis_labels = {{"1", "p", "R"}};
    return m;
  };
  const DensityMatrix rho0 = DensityMatrix::pure(StateVector::basis(3, 0), SubsystemDims({3}));
  const std::vector<Observable> obs{{"one", [](const DensityMatrix& r) { return r.matrix()(0, 0).real(); }}};
  TimeDepOptions td;
  td.max_halvings = 0;
  td.tolerance = 1e-14;
  CHECK_THROWS_AS(evolve_timedep(builder, PulseSchedule::cosine_ramp(30.0, 5.0), rho0, 5.0, 5.0, obs, td),
                  NumericalError);
}

TEST_CASE("steady states") {
  const SteadyStateResult tl = steady_state(two_level(0.5, 0.0));
  REQUIRE(tl.unique());
  CHECK(std::abs(tl.state->matrix()(0, 0) - Complex(1.0)) < 1e-10);
  CHECK(tl.residual < 1e-8);
  CHECK(tl.gap == doctest::Approx(0.25).epsilon(1e-9));

  // Single atom without microwave: |0> is decoupled, so the kernel is 2-fold.
  const ModelSystem m = build_single_atom(fig1b());
  const SteadyStateResult deg = steady_state(m);
  CHECK(deg.multiplicity == 2);
  CHECK(deg.basis.size() == 2);
  CHECK_THROWS_AS(deg.require_unique(), NumericalError);

  const ModelSystem sub = restrict_levels(m, {1, 2, 3});
  const SteadyStateResult ss = steady_state(sub);
  REQUIRE(ss.unique());
  ComplexVector d(3);
  d << 1.0, 0.0, -1.0;
  CHECK(fidelity(*ss.state, StateVector::normalize(d)) > 0.99);
  CHECK(ss.residual < 1e-8);

  std::mt19937 rng(46);
  const ModelSystem r = random_model(6, 3, rng);
  const SteadyStateResult rs = steady_state(r);
  REQUIRE(rs.unique());
  CHECK(max_abs(lindblad_rhs(r, rs.state->matrix())) < 1e-9);
  CHECK(rs.state->physicality().min_eigenvalue > -1e-10);
}

TEST_CASE("evolution aborts on a non-physical generator") {
  // An anti-Hermitian "Hamiltonian" makes the trace grow.
  ModelSystem bad = two_level(0.0);
  bad.collapse_ops.clear();
  bad.hamiltonian(0, 0) = Complex(0.0, -1.0);
  const DensityMatrix g = DensityMatrix::pure(StateVector::basis(2, 0), bad.dims);
  CHECK_THROWS(evolve(bad, g, 1.0, 0.1, {}));
}
