#include "rydsim/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim {

SubsystemDims::SubsystemDims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("SubsystemDims: at least one subsystem is required");
  for (int d : dims_) {
    if (d < 1) throw DimensionError("SubsystemDims: local dimensions must be positive");
  }
}

int SubsystemDims::total() const {
  return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<>());
}

void SubsystemDims::require_total(Eigen::Index n) const {
  if (total() != n) {
    std::ostringstream msg;
    msg << "subsystem dimensions multiply to " << total() << " but the matrix has dimension " << n;
    throw DimensionError(msg.str());
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

double hermiticity_violation(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / scale;
}

ComplexMatrix embed_operator(const ComplexMatrix& local, const SubsystemDims& dims, std::size_t k) {
  if (k >= dims.count()) throw DimensionError("embed_operator: subsystem index out of range");
  if (local.rows() != dims[k] || local.cols() != dims[k]) {
    throw DimensionError("embed_operator: local operator does not match subsystem dimension");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t s = 0; s < dims.count(); ++s) {
    out = kron(out, s == k ? local : ComplexMatrix::Identity(dims[s], dims[s]).eval());
  }
  return out;
}

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(msg.str());
  }
}

}  // namespace

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const SubsystemDims& dims, std::size_t subsystem) {
  require_square(rho, "partial_transpose");
  dims.require_total(rho.rows());
  if (subsystem >= dims.count()) throw DimensionError("partial_transpose: subsystem index out of range");

  Eigen::Index stride = 1;
  for (std::size_t s = subsystem + 1; s < dims.count(); ++s) stride *= dims[s];
  const Eigen::Index local = dims[subsystem];

  const Eigen::Index n = rho.rows();
  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jk = (j / stride) % local;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index ik = (i / stride) % local;
      out(i + (jk - ik) * stride, j + (ik - jk) * stride) = rho(i, j);
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemDims& dims,
                            std::span<const std::size_t> keep) {
  require_square(rho, "partial_trace");
  dims.require_total(rho.rows());

  std::vector<bool> kept(dims.count(), false);
  for (std::size_t k : keep) {
    if (k >= dims.count()) throw DimensionError("partial_trace: subsystem index out of range");
    if (kept[k]) throw DimensionError("partial_trace: duplicate subsystem in keep set");
    kept[k] = true;
  }

  // Split every full index into (kept multi-index, traced multi-index).
  const Eigen::Index n = rho.rows();
  std::vector<Eigen::Index> kept_index(n), traced_index(n);
  Eigen::Index kept_total = 1;
  for (std::size_t s = 0; s < dims.count(); ++s) {
    if (kept[s]) kept_total *= dims[s];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index rem = i, k_idx = 0, t_idx = 0, k_mul = 1, t_mul = 1;
    for (std::size_t s = dims.count(); s-- > 0;) {
      const Eigen::Index digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        k_idx += digit * k_mul;
        k_mul *= dims[s];
      } else {
        t_idx += digit * t_mul;
        t_mul *= dims[s];
      }
    }
    kept_index[i] = k_idx;
    traced_index[i] = t_idx;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_total, kept_total);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += rho(i, j);
    }
  }
  return out;
}

namespace {

void require_hermitian(const ComplexMatrix& a, const char* what) {
  require_square(a, what);
  const double violation = hermiticity_violation(a);
  if (violation > kHermitianTolerance) {
    std::ostringstream msg;
    msg << what << ": matrix is not Hermitian (relative violation " << violation << " > "
        << kHermitianTolerance << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

HermitianEigen eig_hermitian(const ComplexMatrix& a) {
  require_hermitian(a, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigvals_hermitian(const ComplexMatrix& a) {
  require_hermitian(a, "eigvals_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigvals_hermitian: eigensolver did not converge");
  return solver.eigenvalues();
}

double trace_norm(const ComplexMatrix& a) {
  require_square(a, "trace_norm");
  if (hermiticity_violation(a) <= kHermitianTolerance) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

double norm1(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace rydsim
