#include <sstream>

#include "rydsim/dynamics.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw DimensionError("unvectorize: size mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

namespace {

void require_model_dim(const ModelSystem& model, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != model.dim() || cols != model.dim()) {
    std::ostringstream msg;
    msg << what << ": state is " << rows << "x" << cols << " but the model has dimension " << model.dim();
    throw DimensionError(msg.str());
  }
}

}  // namespace

ComplexMatrix lindblad_rhs(const ModelSystem& model, const ComplexMatrix& rho) {
  require_model_dim(model, rho.rows(), rho.cols(), "lindblad_rhs");
  const ComplexMatrix& h = model.hamiltonian;
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& c : model.collapse_ops) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (rho * cdc + cdc * rho);
  }
  return out;
}

ComplexMatrix lindblad_rhs(const ModelSystem& model, const DensityMatrix& rho) {
  return lindblad_rhs(model, rho.matrix());
}

Liouvillian build_liouvillian(const ModelSystem& model) {
  const int d = model.dim();
  if (d > kMaxLiouvillianHilbertDim) {
    std::ostringstream msg;
    msg << "build_liouvillian: Hilbert dimension " << d << " exceeds the cap of " << kMaxLiouvillianHilbertDim;
    throw DimensionError(msg.str());
  }
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix& h = model.hamiltonian;

  Liouvillian l;
  l.hilbert_dim = d;
  l.superop = -kI * (kron(id, h) - kron(h.transpose(), id));
  ComplexMatrix cdc_total = ComplexMatrix::Zero(d, d);
  for (const auto& c : model.collapse_ops) {
    l.superop += kron(c.conjugate(), c);
    cdc_total += c.adjoint() * c;
  }
  l.superop -= 0.5 * (kron(id, cdc_total) + kron(cdc_total.transpose(), id));
  return l;
}

LindbladKernel::LindbladKernel(const ModelSystem& model) : dim_(model.dim()) {
  const int d = dim_;
  ComplexMatrix cdc_total = ComplexMatrix::Zero(d, d);
  double jump_bound = 0.0;
  for (const auto& c : model.collapse_ops) {
    if (c.rows() != d || c.cols() != d) throw DimensionError("LindbladKernel: collapse operator shape mismatch");
    cdc_total += c.adjoint() * c;
    std::vector<Entry> entries;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        if (c(i, j) != Complex(0.0, 0.0)) entries.push_back({i, j, c(i, j)});
      }
    }
    const double n1 = norm1(c);
    jump_bound += n1 * n1;
    if (!entries.empty()) jumps_.push_back(std::move(entries));
  }
  const ComplexMatrix h_eff = model.hamiltonian - 0.5 * kI * cdc_total;
  h_eff_ = h_eff.sparseView();
  h_eff_adj_ = h_eff.adjoint().sparseView();
  norm_bound_ = 2.0 * norm1(model.hamiltonian) + norm1(cdc_total) + jump_bound;
}

void LindbladKernel::apply(const ComplexMatrix& x, ComplexMatrix& out) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw DimensionError("LindbladKernel: state dimension mismatch");
  // -i (H_eff x - x H_eff^dag)
  out.noalias() = (-kI) * (h_eff_ * x);
  out.noalias() += kI * (x * h_eff_adj_);
  for (const auto& entries : jumps_) {
    for (const auto& a : entries) {
      for (const auto& b : entries) {
        out(a.row, b.row) += a.value * std::conj(b.value) * x(a.col, b.col);
      }
    }
  }
}

ComplexMatrix LindbladKernel::operator()(const ComplexMatrix& x) const {
  ComplexMatrix out(dim_, dim_);
  apply(x, out);
  return out;
}

}  // namespace rydsim
