#pragma once

#include <array>
#include <string>
#include <vector>

#include "rydsim/model.hpp"

namespace rydsim {

// One (m, n) entry of the effective two-excitation couplings, with m the
// atom-1 Rydberg index in {0,1} and n the atom-2 index in {0,2}.
struct PairCoupling {
  int m = 0;
  int n = 0;
  double v_eff = 0.0;          // <D_m D_n|H|D_m D_n>
  double omega_eff = 0.0;      // <R_m R_n|H|D_m D_n> by contraction
  double omega_eff_printed = 0.0;  // O1^2 V_{m,n}, the unnormalized closed form
};

// Effective-model diagnostics. Every number is a literal matrix element of
// the assembled two-atom Hamiltonian; none is taken from a closed form.
struct EffectiveCouplingReport {
  // <D0|H_w1|2>, <D0|H_w1|D1>, <D0|H_w2|1>, <D0|H_w2|D2>
  std::array<double, 4> omega_eff{};
  std::array<PairCoupling, 4> pairs{};  // (0,0), (1,0), (0,2), (1,2)
  // Omega_00^eff / min(Omega_10^eff, Omega_02^eff, Omega_12^eff); +inf when
  // the minimum vanishes.
  double asymmetry_ratio = 0.0;
  // Largest |contraction - printed| / |contraction| over the four pairs.
  double printed_formula_discrepancy = 0.0;
  // Spectrum of the 9-level effective microwave Hamiltonian on
  // {D0, D1, 2} x {D0, 1, D2}, ascending.
  std::vector<double> microwave_spectrum;
  int microwave_dark_multiplicity = 0;

  const PairCoupling& pair(int m, int n) const;
};

EffectiveCouplingReport effective_couplings(const AtomParams& p, const RRIMatrix& v);

}  // namespace rydsim
