#include "rydsim/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rydsim/errors.hpp"

namespace rydsim {

const PairCoupling& EffectiveCouplingReport::pair(int m, int n) const {
  for (const auto& p : pairs) {
    if (p.m == m && p.n == n) return p;
  }
  throw DimensionError("EffectiveCouplingReport: no such (m, n) pair");
}

namespace {

ComplexVector local(int level) {
  ComplexVector v = ComplexVector::Zero(two_atom::kLocalDim);
  v(level) = 1.0;
  return v;
}

double element(const ComplexMatrix& h, const ComplexVector& bra, const ComplexVector& ket) {
  return bra.dot(h * ket).real();
}

}  // namespace

EffectiveCouplingReport effective_couplings(const AtomParams& p, const RRIMatrix& v) {
  using namespace two_atom;
  const ModelSystem model = build_two_atom(p, v);
  const ComplexMatrix& h = model.hamiltonian;

  const ComplexVector d0 = dark_state(p.omega1, p.omega2, 0).amplitudes();
  const ComplexVector d1 = dark_state(p.omega1, p.omega2, 1).amplitudes();
  const ComplexVector d2 = dark_state(p.omega1, p.omega2, 2).amplitudes();
  const ComplexVector g1 = local(kGround1);
  const ComplexVector g2 = local(kGround2);

  EffectiveCouplingReport r;

  // Single-atom microwave elements, read off the full Hamiltonian with the
  // other atom parked in its undriven ground level (|2> on either atom is
  // untouched by the lasers and orthogonal to every Rydberg component).
  const ComplexVector spectator = g2;
  r.omega_eff[0] = element(h, kron(d0, spectator), kron(g2, spectator));
  r.omega_eff[1] = element(h, kron(d0, spectator), kron(d1, spectator));
  r.omega_eff[2] = element(h, kron(spectator, d0), kron(spectator, g1));
  r.omega_eff[3] = element(h, kron(spectator, d0), kron(spectator, d2));

  const double o1sq = p.omega1 * p.omega1;
  std::size_t k = 0;
  double min_other = std::numeric_limits<double>::infinity();
  for (int m : {0, 1}) {
    for (int n : {0, 2}) {
      const ComplexVector dm = m == 0 ? d0 : d1;
      const ComplexVector dn = n == 0 ? d0 : d2;
      const ComplexVector pair_dark = kron(dm, dn);
      const ComplexVector pair_rydberg = kron(local(rydberg_of(1, m)), local(rydberg_of(2, n)));
      PairCoupling c;
      c.m = m;
      c.n = n;
      c.v_eff = element(h, pair_dark, pair_dark);
      c.omega_eff = element(h, pair_rydberg, pair_dark);
      c.omega_eff_printed = o1sq * v.at(m, n);
      if (c.omega_eff != 0.0) {
        r.printed_formula_discrepancy = std::max(
            r.printed_formula_discrepancy, std::abs(c.omega_eff - c.omega_eff_printed) / std::abs(c.omega_eff));
      }
      if (!(m == 0 && n == 0)) min_other = std::min(min_other, std::abs(c.omega_eff));
      r.pairs[k++] = c;
    }
  }
  const double omega00 = std::abs(r.pair(0, 0).omega_eff);
  r.asymmetry_ratio = min_other > 0.0 ? omega00 / min_other : std::numeric_limits<double>::infinity();

  // Effective microwave Hamiltonian. Local bases: atom 1 {D0, D1, 2},
  // atom 2 {D0, 1, D2}, index 0 is D0 in both.
  ComplexMatrix h1 = ComplexMatrix::Zero(3, 3);
  h1(0, 2) = h1(2, 0) = r.omega_eff[0];
  h1(0, 1) = h1(1, 0) = r.omega_eff[1];
  ComplexMatrix h2 = ComplexMatrix::Zero(3, 3);
  h2(0, 1) = h2(1, 0) = r.omega_eff[2];
  h2(0, 2) = h2(2, 0) = r.omega_eff[3];
  const ComplexMatrix id3 = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix h_mw = kron(h1, id3) + kron(id3, h2);
  const RealVector spectrum = eigvals_hermitian(h_mw);
  const double scale = std::max(1e-300, spectrum.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    r.microwave_spectrum.push_back(spectrum(i));
    if (std::abs(spectrum(i)) <= 1e-9 * scale) ++r.microwave_dark_multiplicity;
  }
  return r;
}

}  // namespace rydsim
