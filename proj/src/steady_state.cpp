#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "rydsim/dynamics.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {

const DensityMatrix& SteadyStateResult::require_unique() const {
  if (!unique()) {
    std::ostringstream msg;
    msg << "steady state is not unique: null space of the Liouvillian has dimension " << multiplicity;
    throw NumericalError(msg.str());
  }
  return *state;
}

namespace {

constexpr double kNullTolerance = 1e-8;
constexpr int kFullSpectrumMaxDim = 20;
constexpr double kBorderedRcondFloor = 1e-13;

void finish_unique(const ModelSystem& model, const ComplexVector& null_vector, SteadyStateResult& r) {
  const int d = model.dim();
  ComplexMatrix rho = unvectorize(null_vector, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw NumericalError("steady_state: null vector has zero trace");
  rho = hermitian_part(rho / tr);
  r.residual = lindblad_rhs(model, rho).norm();
  r.state.emplace(std::move(rho), model.dims);
}

// Null space of L from its SVD: right singular vectors whose singular value
// is below the tolerance.
void null_space_svd(const ComplexMatrix& l, SteadyStateResult& r) {
  Eigen::BDCSVD<ComplexMatrix> svd(l, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const int n = static_cast<int>(sv.size());
  const double tol = kNullTolerance * std::max(1.0, sv(0));
  for (int i = n - 1; i >= 0 && sv(i) <= tol; --i) {
    r.basis.push_back(unvectorize(svd.matrixV().col(i), static_cast<int>(std::lround(std::sqrt(n)))));
  }
  r.multiplicity = static_cast<int>(r.basis.size());
}

// Rank-revealing QR of L^dagger: columns of Q beyond the rank span
// range(L^dagger)^perp = ker(L).
void null_space_qr(const ComplexMatrix& l, SteadyStateResult& r) {
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(l.adjoint());
  qr.setThreshold(kNullTolerance);
  const Eigen::Index rank = qr.rank();
  const Eigen::Index n = l.rows();
  const ComplexMatrix q = qr.householderQ();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  for (Eigen::Index i = rank; i < n; ++i) r.basis.push_back(unvectorize(q.col(i), d));
  r.multiplicity = static_cast<int>(n - rank);
}

}  // namespace

SteadyStateResult steady_state(const ModelSystem& model) {
  model.validate();
  const int d = model.dim();
  const Liouvillian l = build_liouvillian(model);
  const Eigen::Index n = l.superop.rows();
  SteadyStateResult r;

  if (d <= kFullSpectrumMaxDim) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(l.superop, false);
    if (es.info() != Eigen::Success) throw NumericalError("steady_state: Liouvillian eigensolver failed");
    const double scale = std::max(1.0, norm1(l.superop));
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(es.eigenvalues()(i));
      if (mag > kNullTolerance * scale) gap = std::min(gap, mag);
    }
    r.gap = gap;
    null_space_svd(l.superop, r);
    if (r.multiplicity == 0) throw NumericalError("steady_state: Liouvillian has no null vector");
    if (r.multiplicity == 1) finish_unique(model, vectorize(r.basis.front()), r);
    return r;
  }

  // Bordered system: the row of L at vec index (0,0) is replaced by the trace
  // functional. Trace preservation makes the diagonal-position rows linearly
  // dependent, so the bordered matrix is regular iff ker(L) is 1-dimensional.
  ComplexMatrix bordered = l.superop;
  bordered.row(0).setZero();
  for (int k = 0; k < d; ++k) bordered(0, static_cast<Eigen::Index>(k) * d + k) = 1.0;
  Eigen::PartialPivLU<ComplexMatrix> lu(bordered);
  r.rcond = lu.rcond();
  if (r.rcond > kBorderedRcondFloor) {
    ComplexVector rhs = ComplexVector::Zero(n);
    rhs(0) = 1.0;
    const ComplexVector x = lu.solve(rhs);
    r.multiplicity = 1;
    r.basis.push_back(unvectorize(x, d));
    finish_unique(model, x, r);
    return r;
  }
  null_space_qr(l.superop, r);
  if (r.multiplicity == 1) finish_unique(model, vectorize(r.basis.front()), r);
  return r;
}

}  // namespace rydsim
