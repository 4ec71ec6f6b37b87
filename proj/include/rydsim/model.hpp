#pragma once

#include <string>
#include <vector>

#include "rydsim/linalg.hpp"
#include "rydsim/state.hpp"

namespace rydsim {

// Physical parameters of one driven atom. All frequencies are angular
// frequencies in rad/us, rates in 1/us.
struct AtomParams {
  double omega1 = 0.0;    // ground <-> intermediate Rabi frequency
  double omega2 = 0.0;    // intermediate <-> Rydberg Rabi frequency
  double delta = 0.0;     // detuning of the intermediate level
  double omega_mw = 0.0;  // microwave / Raman coupling between ground levels
  double gamma_p = 0.0;   // intermediate-level decay rate
  double gamma_r = 0.0;   // Rydberg-level decay rate

  // Throws ConfigError on gamma_p <= 0, negative gamma_r or Rabi frequencies.
  void validate() const;
  // Soft violations (gamma_r not much smaller than gamma_p).
  std::vector<std::string> warnings() const;
};

// Rydberg-Rydberg interaction V_{m,n}, atom-1 Rydberg level m in {0,1},
// atom-2 Rydberg level n in {0,2}.
struct RRIMatrix {
  double v00 = 0.0;
  double v10 = 0.0;
  double v02 = 0.0;
  double v12 = 0.0;

  double at(int m, int n) const;
};

// Hamiltonian, jump operators and basis bookkeeping for one scenario.
struct ModelSystem {
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> collapse_ops;
  SubsystemDims dims;
  std::vector<std::vector<std::string>> basis_labels;  // one list per subsystem

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
  // Hermitian H to 1e-12 and matching operator shapes; throws otherwise.
  void validate() const;
  // Index of a level in subsystem k, by label.
  int level_index(std::size_t k, const std::string& label) const;
};

// Restricts a model to the span of the given basis indices. Only meaningful
// when that span is invariant under H and the jump operators.
ModelSystem restrict_levels(const ModelSystem& model, const std::vector<int>& levels);

namespace single_atom {
inline constexpr int kGround0 = 0;
inline constexpr int kGround1 = 1;
inline constexpr int kIntermediate = 2;
inline constexpr int kRydberg = 3;
inline constexpr int kDim = 4;
}  // namespace single_atom

// Local layout shared by both atoms of the two-atom scheme:
//   atom 1: |0>,|1>,|2>,|p0>,|p1>,|R0>,|R1>
//   atom 2: |0>,|1>,|2>,|p0>,|p2>,|R0>,|R2>
// Joint index = 7 * (atom-1 level) + (atom-2 level).
namespace two_atom {
inline constexpr int kGround0 = 0;
inline constexpr int kGround1 = 1;
inline constexpr int kGround2 = 2;
inline constexpr int kIntermediate0 = 3;
inline constexpr int kIntermediateX = 4;  // p1 on atom 1, p2 on atom 2
inline constexpr int kRydberg0 = 5;
inline constexpr int kRydbergX = 6;  // R1 on atom 1, R2 on atom 2
inline constexpr int kLocalDim = 7;
inline constexpr int kDim = kLocalDim * kLocalDim;

inline constexpr int joint(int atom1_level, int atom2_level) { return kLocalDim * atom1_level + atom2_level; }
// Ground level j -> the intermediate / Rydberg level it is laser-coupled to.
int intermediate_of(int atom, int ground);
int rydberg_of(int atom, int ground);
SubsystemDims dims();
}  // namespace two_atom

// H = delta|p><p| + (O1|1><p| + O2|p><R| + h.c.) + (w|0><1| + h.c.)
// with jumps sqrt(gR/2)|1><R|, sqrt(gR/2)|p><R|, sqrt(gp)|1><p|.
ModelSystem build_single_atom(const AtomParams& p);

// 49-dimensional two-atom model with 24 jump operators. Atom 2 carries the
// opposite microwave sign (omega_2 = -omega_1).
ModelSystem build_two_atom(const AtomParams& p, const RRIMatrix& v);

// 3x3 ladder block of the single atom in the (|1>, |p>, |R>) basis.
ComplexMatrix ladder_hamiltonian(double omega1, double omega2, double delta);

// (O2|1> - O1|R>)/sqrt(O1^2 + O2^2) in the 4-level single-atom space.
StateVector single_atom_dark_state(double omega1, double omega2);

// |D_j> = (O2|j> - O1|R_j>)/sqrt(O1^2 + O2^2) in the 7-level local space of
// the two-atom scheme, j in {0,1,2}.
StateVector dark_state(double omega1, double omega2, int j);

struct DressedBasis {
  StateVector dark;
  StateVector zeta_plus;   // eigenvalue e_plus
  StateVector zeta_minus;  // eigenvalue e_minus
  double e0 = 0.0;
  double e_plus = 0.0;   // (delta + delta_tilde)/2
  double e_minus = 0.0;  // (delta - delta_tilde)/2
  double delta_tilde = 0.0;
  double n_plus = 0.0;
  double n_minus = 0.0;
};

// Closed-form dressed states of the ladder Hamiltonian, embedded in the
// 4-level single-atom space.
DressedBasis dressed_basis(const AtomParams& p);

enum class DarkTarget { kMain, kD1, kD2 };

// |DD>  = (|D0>|D0> + |D1>|1> + |2>|D2>)/sqrt 3
// |DD1> = (|D0>|D0> + |D1>|D2> + |2>|1>)/sqrt 3
// |DD2> ~ |D0>|1> + |D0>|D2> + |D1>|D0> + |2>|D0>  (normalized)
StateVector target_state(double omega1, double omega2, DarkTarget which = DarkTarget::kMain);

// (|00> + |11> + |22>)/sqrt 3 in the 49-dimensional space.
StateVector ground_entangled_state();

// Uniform mixture of the nine ground product states.
DensityMatrix initial_mixed_state();

}  // namespace rydsim
