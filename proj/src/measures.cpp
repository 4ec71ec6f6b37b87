#include "rydsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim {

namespace {

constexpr double kClampTolerance = 1e-9;

double expectation(const DensityMatrix& rho, const StateVector& psi, const char* what) {
  if (psi.dim() != rho.dim()) {
    std::ostringstream msg;
    msg << what << ": state has dimension " << psi.dim() << " but rho has dimension " << rho.dim();
    throw DimensionError(msg.str());
  }
  return psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
}

double clamp_unit(double x, const char* what) {
  if (x < -kClampTolerance || x > 1.0 + kClampTolerance) {
    std::ostringstream msg;
    msg << what << " = " << x << " lies outside [0, 1] beyond tolerance";
    throw NumericalError(msg.str());
  }
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  return clamp_unit(expectation(rho, target, "fidelity"), "fidelity");
}

double population(const DensityMatrix& rho, const StateVector& basis_state) {
  return clamp_unit(expectation(rho, basis_state, "population"), "population");
}

double purity(const DensityMatrix& rho) {
  // Tr[rho^2] = sum_ij rho_ij rho_ji; for Hermitian rho this is ||rho||_F^2.
  const ComplexMatrix& m = rho.matrix();
  return (m.cwiseProduct(m.transpose())).sum().real();
}

double partial_transpose_trace_norm(const DensityMatrix& rho, std::size_t split) {
  return trace_norm(partial_transpose(rho.matrix(), rho.dims(), split));
}

double negativity(const DensityMatrix& rho, std::size_t split) {
  const double n = 0.5 * (partial_transpose_trace_norm(rho, split) - 1.0);
  if (n < -kClampTolerance) {
    std::ostringstream msg;
    msg << "negativity = " << n << " is negative beyond tolerance (is rho normalized?)";
    throw NumericalError(msg.str());
  }
  return std::max(0.0, n);
}

double log_negativity(const DensityMatrix& rho, std::size_t split) {
  return std::log2(2.0 * negativity(rho, split) + 1.0);
}

MeasureReport measure(const DensityMatrix& rho, const StateVector& target, std::size_t split,
                      const std::map<std::string, StateVector>& population_states) {
  MeasureReport r;
  r.fidelity = fidelity(rho, target);
  r.purity = purity(rho);
  r.negativity = negativity(rho, split);
  r.log_negativity = std::log2(2.0 * r.negativity + 1.0);
  for (const auto& [name, psi] : population_states) r.populations[name] = population(rho, psi);
  return r;
}

}  // namespace rydsim
