#include <cmath>
#include <random>

#include "doctest.h"
#include "rydsim/errors.hpp"
#include "rydsim/linalg.hpp"
#include "test_support.hpp"

using namespace rydsim;
using rydsim::testing::max_abs;
using rydsim::testing::random_density;
using rydsim::testing::random_hermitian;
using rydsim::testing::random_matrix;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

// Element formula (A kron B)[i*p + k, j*q + l] = a_ij b_kl.
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ComplexVector bell() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

ComplexVector qutrit_max() {
  ComplexVector v = ComplexVector::Zero(9);
  v(0) = v(4) = v(8) = 1.0 / std::sqrt(3.0);
  return v;
}

}  // namespace

TEST_CASE("kron basic cases") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK(max_abs(kron(i2, i2) - ComplexMatrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(kron(diag({1, 0}), diag({0, 1})) - diag({0, 1, 0, 0})) == 0.0);
}

TEST_CASE("kron matches the element formula") {
  std::mt19937 rng(11);
  const ComplexMatrix a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
  CHECK(max_abs(kron(a, b) - kron_oracle(a, b)) < 1e-14);
  const ComplexMatrix c = random_matrix(2, 4, rng);
  CHECK(max_abs(kron(c, a) - kron_oracle(c, a)) < 1e-14);
}

TEST_CASE("kron is associative") {
  std::mt19937 rng(12);
  const ComplexMatrix a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng), c = random_matrix(2, 2, rng);
  CHECK(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-12);
}

TEST_CASE("dagger") {
  std::mt19937 rng(13);
  const ComplexMatrix a = random_matrix(4, 4, rng);
  CHECK(max_abs(dagger(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs(dagger(dagger(a)) - a) == 0.0);
  ComplexMatrix op = ComplexMatrix::Zero(4, 4);
  op(1, 2) = 1.0;
  const ComplexMatrix d = dagger(op);
  CHECK(d(2, 1) == Complex(1.0, 0.0));
  CHECK(d.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("partial transpose of a product state") {
  std::mt19937 rng(14);
  const ComplexMatrix ra = random_density(3, rng), rb = random_density(2, rng);
  const SubsystemDims dims({3, 2});
  CHECK(max_abs(partial_transpose(kron(ra, rb), dims, 0) - kron(ra.transpose(), rb)) < 1e-14);
  CHECK(max_abs(partial_transpose(kron(ra, rb), dims, 1) - kron(ra, rb.transpose())) < 1e-14);
}

TEST_CASE("partial transpose is an involution preserving trace and Hermiticity") {
  std::mt19937 rng(15);
  const SubsystemDims dims({3, 4});
  const ComplexMatrix rho = random_density(12, rng);
  for (std::size_t k = 0; k < 2; ++k) {
    const ComplexMatrix pt = partial_transpose(rho, dims, k);
    CHECK(max_abs(partial_transpose(pt, dims, k) - rho) == 0.0);
    CHECK(std::abs(pt.trace() - rho.trace()) < 1e-14);
    CHECK(hermiticity_violation(pt) < 1e-14);
  }
}

TEST_CASE("partial transpose of a Bell state") {
  const ComplexVector b = bell();
  const ComplexMatrix pt = partial_transpose(b * b.adjoint(), SubsystemDims({2, 2}), 0);
  // Brute-force 4x4 eigensolve, independent of eig_hermitian.
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(pt);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(solver.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(-0.5).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(ev[i] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(trace_norm(pt) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("partial transpose rejects mismatched dimensions") {
  const ComplexMatrix rho = ComplexMatrix::Identity(6, 6) / 6.0;
  CHECK_THROWS_AS(partial_transpose(rho, SubsystemDims({2, 2}), 0), DimensionError);
  CHECK_THROWS_AS(partial_transpose(rho, SubsystemDims({2, 3}), 2), DimensionError);
  CHECK_THROWS_AS(partial_transpose(ComplexMatrix::Zero(6, 4), SubsystemDims({2, 3}), 0), DimensionError);
}

TEST_CASE("partial trace") {
  std::mt19937 rng(16);
  const ComplexMatrix ra = random_density(3, rng);
  ComplexMatrix rb = random_density(4, rng) * 2.5;
  const SubsystemDims dims({3, 4});
  CHECK(max_abs(partial_trace(kron(ra, rb), dims, {0}) - ra * rb.trace()) < 1e-13);

  const ComplexMatrix rho = random_density(12, rng);
  CHECK(std::abs(partial_trace(rho, dims, {1}).trace() - rho.trace()) < 1e-13);
  // All-but-one, then the rest.
  const ComplexMatrix r1 = partial_trace(rho, dims, {0});
  CHECK(std::abs(r1.trace() - rho.trace()) < 1e-13);
  CHECK(max_abs(partial_trace(rho, dims, {0, 1}) - rho) == 0.0);

  const SubsystemDims three({2, 3, 2});
  const ComplexMatrix big = random_density(12, rng);
  const ComplexMatrix r02 = partial_trace(big, three, {0, 2});
  const ComplexMatrix r0 = partial_trace(r02, SubsystemDims({2, 2}), {0});
  CHECK(max_abs(r0 - partial_trace(big, three, {0})) < 1e-13);
}

TEST_CASE("reduced state of the qutrit maximally entangled state") {
  const ComplexVector v = qutrit_max();
  const ComplexMatrix rho = v * v.adjoint();
  // Direct index contraction oracle.
  ComplexMatrix oracle = ComplexMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) oracle(i, j) += rho(3 * i + k, 3 * j + k);
  const ComplexMatrix reduced = partial_trace(rho, SubsystemDims({3, 3}), {0});
  CHECK(max_abs(reduced - oracle) < 1e-15);
  CHECK(max_abs(reduced - ComplexMatrix::Identity(3, 3) / 3.0) < 1e-15);
}

TEST_CASE("Hermitian eigendecomposition") {
  const HermitianEigen d = eig_hermitian(diag({3, 1, 2}));
  CHECK(d.values(0) == doctest::Approx(1.0));
  CHECK(d.values(1) == doctest::Approx(2.0));
  CHECK(d.values(2) == doctest::Approx(3.0));

  ComplexMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const HermitianEigen e = eig_hermitian(sx);
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(e.vectors(0, 0) + e.vectors(1, 0)) < 1e-12);
  CHECK(std::abs(e.vectors(0, 1) - e.vectors(1, 1)) < 1e-12);
}

TEST_CASE("Hermitian eigendecomposition reconstructs random input") {
  std::mt19937 rng(17);
  const ComplexMatrix a = random_hermitian(10, rng);
  const HermitianEigen d = eig_hermitian(a);
  const ComplexMatrix& v = d.vectors;
  CHECK((v * d.values.cast<Complex>().asDiagonal() * v.adjoint() - a).norm() / a.norm() < 1e-12);
  CHECK((a * v - v * d.values.cast<Complex>().asDiagonal()).norm() / a.norm() < 1e-9);
  CHECK((v.adjoint() * v - ComplexMatrix::Identity(10, 10)).norm() < 1e-12);
  for (int i = 1; i < 10; ++i) CHECK(d.values(i - 1) <= d.values(i));
}

TEST_CASE("Hermitian eigendecomposition rejects non-Hermitian input with the violation size") {
  ComplexMatrix a(2, 2);
  a << 0, 1, 0, 0;
  try {
    eig_hermitian(a);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  ComplexMatrix tiny = ComplexMatrix::Identity(2, 2);
  tiny(0, 1) = 1e-13;
  CHECK_NOTHROW(eig_hermitian(tiny));
}

TEST_CASE("trace norm") {
  std::mt19937 rng(18);
  CHECK(trace_norm(ComplexMatrix::Identity(5, 5)) == doctest::Approx(5.0));
  CHECK(trace_norm(random_density(6, rng)) == doctest::Approx(1.0).epsilon(1e-12));
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_matrix(5, 5, rng);
    CHECK(trace_norm(a) >= std::abs(a.trace()) - 1e-12);
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    CHECK(trace_norm(a) == doctest::Approx(svd.singularValues().sum()).epsilon(1e-12));
  }
}

TEST_CASE("matrix exponential") {
  std::mt19937 rng(19);
  CHECK(max_abs(expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)) == 0.0);

  // Diagonalizable oracle over a wide range of norms exercises every Pade
  // degree and the squaring phase.
  for (double scale : {1e-3, 0.1, 0.8, 2.0, 5.0, 40.0, 900.0}) {
    const ComplexMatrix h = random_hermitian(6, rng);
    const HermitianEigen e = eig_hermitian(h);
    const Complex factor(-0.05 * scale, -scale);
    ComplexVector ex(6);
    for (int i = 0; i < 6; ++i) ex(i) = std::exp(factor * e.values(i));
    const ComplexMatrix oracle = e.vectors * ex.asDiagonal() * e.vectors.adjoint();
    const ComplexMatrix got = expm(h * factor);
    CHECK((got - oracle).norm() / oracle.norm() < 1e-11 * std::max(1.0, std::abs(factor) * h.norm()));
  }

  // Nilpotent block: exp(N) = I + N + N^2/2.
  ComplexMatrix n = ComplexMatrix::Zero(3, 3);
  n(0, 1) = 2.0;
  n(1, 2) = 3.0;
  ComplexMatrix expect = ComplexMatrix::Identity(3, 3) + n + n * n / 2.0;
  CHECK(max_abs(expm(n) - expect) < 1e-13);
}
