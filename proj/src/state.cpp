#include "rydsim/state.hpp"

#include <cmath>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim {

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw DimensionError("StateVector: empty amplitude list");
  const double err = std::abs(amplitudes_.norm() - 1.0);
  if (err > 1e-12) {
    std::ostringstream msg;
    msg << "StateVector: amplitudes are not unit norm (|norm - 1| = " << err << ")";
    throw NumericalError(msg.str());
  }
}

StateVector StateVector::normalize(ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("StateVector: cannot normalize a zero vector");
  return StateVector(amplitudes / n);
}

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("StateVector::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  if (matrix_.rows() != matrix_.cols()) throw DimensionError("DensityMatrix: matrix must be square");
  dims_.require_total(matrix_.rows());
}

DensityMatrix DensityMatrix::pure(const StateVector& psi, SubsystemDims dims) {
  return DensityMatrix(psi.projector(), std::move(dims));
}

DensityMatrix DensityMatrix::maximally_mixed(SubsystemDims dims) {
  const int d = dims.total();
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
}

PhysicalityReport DensityMatrix::physicality() const {
  PhysicalityReport r;
  r.hermiticity_defect = (matrix_ - matrix_.adjoint()).norm();
  r.trace_error = std::abs(matrix_.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(matrix_), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues()(0);
  return r;
}

void DensityMatrix::check_physical() const {
  const PhysicalityReport r = physicality();
  std::ostringstream msg;
  if (r.hermiticity_defect > kHermitianTolerance) {
    msg << "density matrix is not Hermitian (||rho - rho^dagger||_F = " << r.hermiticity_defect << ")";
  } else if (r.trace_error > kTraceTolerance) {
    msg << "density matrix trace deviates from 1 by " << r.trace_error;
  } else if (r.min_eigenvalue < -kPositivityTolerance) {
    msg << "density matrix has negative eigenvalue " << r.min_eigenvalue;
  } else {
    return;
  }
  throw NumericalError(msg.str());
}

}  // namespace rydsim
