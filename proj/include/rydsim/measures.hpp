#pragma once

#include <map>
#include <string>

#include "rydsim/state.hpp"

namespace rydsim {

// <psi|rho|psi>, clamped to [0, 1] after a 1e-9 tolerance check.
double fidelity(const DensityMatrix& rho, const StateVector& target);

// Tr[rho^2]
double purity(const DensityMatrix& rho);

// Trace norm of the partial transpose over `split`.
double partial_transpose_trace_norm(const DensityMatrix& rho, std::size_t split);

// (||rho^{T_split}||_1 - 1)/2. Values in [-1e-9, 0) are clamped to 0; more
// negative values raise NumericalError.
double negativity(const DensityMatrix& rho, std::size_t split = 1);

// log2(2 N + 1) = log2 ||rho^{T_split}||_1
double log_negativity(const DensityMatrix& rho, std::size_t split = 1);

// <psi|rho|psi> without the fidelity naming; used for level and dressed-state
// populations.
double population(const DensityMatrix& rho, const StateVector& basis_state);

struct MeasureReport {
  double fidelity = 0.0;
  double purity = 0.0;
  double negativity = 0.0;
  double log_negativity = 0.0;
  std::map<std::string, double> populations;
};

MeasureReport measure(const DensityMatrix& rho, const StateVector& target, std::size_t split,
                      const std::map<std::string, StateVector>& population_states = {});

}  // namespace rydsim
