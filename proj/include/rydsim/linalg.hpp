#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rydsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Local Hilbert-space dimensions of a composite system. Subsystem 0 is the
// most significant factor, matching the ordering produced by kron(a, b).
class SubsystemDims {
 public:
  SubsystemDims() = default;
  explicit SubsystemDims(std::vector<int> dims);

  std::size_t count() const { return dims_.size(); }
  int operator[](std::size_t k) const { return dims_.at(k); }
  int total() const;
  const std::vector<int>& values() const { return dims_; }

  // Throws DimensionError unless total() == n.
  void require_total(Eigen::Index n) const;

  bool operator==(const SubsystemDims&) const = default;

 private:
  std::vector<int> dims_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

ComplexMatrix dagger(const ComplexMatrix& a);

// (A + A^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

// ||A - A^dagger||_F / ||A||_F, zero for the zero matrix.
double hermiticity_violation(const ComplexMatrix& a);

inline constexpr double kHermitianTolerance = 1e-10;

// Places `local` on subsystem k of a composite space, identity elsewhere.
ComplexMatrix embed_operator(const ComplexMatrix& local, const SubsystemDims& dims, std::size_t k);

// Transposes the row/column indices belonging to one subsystem.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemDims& dims, std::size_t subsystem);

// Reduced operator on the kept subsystems (kept in increasing order).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemDims& dims,
                            std::span<const std::size_t> keep);
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemDims& dims,
                                   std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, dims, std::span<const std::size_t>(keep.begin(), keep.size()));
}

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // column i pairs with values[i]
};

// Throws NumericalError when the input is not Hermitian to kHermitianTolerance.
HermitianEigen eig_hermitian(const ComplexMatrix& a);
RealVector eigvals_hermitian(const ComplexMatrix& a);

// Sum of singular values.
double trace_norm(const ComplexMatrix& a);

// Matrix exponential by Pade approximation with scaling and squaring
// (degrees 3/5/7/9/13 selected from the 1-norm).
ComplexMatrix expm(const ComplexMatrix& a);

double norm1(const ComplexMatrix& a);

}  // namespace rydsim
