#pragma once

#include "rydsim/linalg.hpp"

namespace rydsim {

// Unit-norm pure state.
class StateVector {
 public:
  // Requires ||amplitudes|| = 1 to 1e-12.
  explicit StateVector(ComplexVector amplitudes);

  // Rescales to unit norm; throws NumericalError for the zero vector.
  static StateVector normalize(ComplexVector amplitudes);
  static StateVector basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }

  Complex inner(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }
  ComplexMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  ComplexVector amplitudes_;
};

inline StateVector kron(const StateVector& a, const StateVector& b) {
  return StateVector::normalize(kron(a.amplitudes(), b.amplitudes()));
}

struct PhysicalityReport {
  double hermiticity_defect = 0.0;  // ||rho - rho^dagger||_F
  double trace_error = 0.0;         // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};

// Density matrix on a composite space. Construction checks shapes only;
// check_physical() verifies Hermiticity, unit trace and positivity.
class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-9;
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPositivityTolerance = 1e-8;

  DensityMatrix(ComplexMatrix matrix, SubsystemDims dims);
  static DensityMatrix pure(const StateVector& psi, SubsystemDims dims);
  static DensityMatrix maximally_mixed(SubsystemDims dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  const SubsystemDims& dims() const { return dims_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  PhysicalityReport physicality() const;
  // Throws NumericalError when any tolerance is exceeded.
  void check_physical() const;

 private:
  ComplexMatrix matrix_;
  SubsystemDims dims_;
};

}  // namespace rydsim
