#include "rydsim/model.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "rydsim/errors.hpp"

namespace rydsim {

void AtomParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(omega1) && finite(omega2) && finite(delta) && finite(omega_mw) && finite(gamma_p) &&
        finite(gamma_r))) {
    throw ConfigError("AtomParams: all parameters must be finite");
  }
  auto fail = [](const char* what, double value) {
    std::ostringstream msg;
    msg << "AtomParams: " << what << " (got " << value << ")";
    throw ConfigError(msg.str());
  };
  if (!(gamma_p > 0.0)) fail("gamma_p must be positive", gamma_p);
  if (gamma_r < 0.0) fail("gamma_r must be non-negative", gamma_r);
  if (omega1 < 0.0) fail("omega1 must be non-negative", omega1);
  if (omega2 < 0.0) fail("omega2 must be non-negative", omega2);
}

std::vector<std::string> AtomParams::warnings() const {
  std::vector<std::string> out;
  if (gamma_r > 0.1 * gamma_p) {
    std::ostringstream msg;
    msg << "gamma_r (" << gamma_r << ") is not much smaller than gamma_p (" << gamma_p << ")";
    out.push_back(msg.str());
  }
  return out;
}

double RRIMatrix::at(int m, int n) const {
  if (m == 0 && n == 0) return v00;
  if (m == 1 && n == 0) return v10;
  if (m == 0 && n == 2) return v02;
  if (m == 1 && n == 2) return v12;
  throw DimensionError("RRIMatrix: (m, n) must lie in {0,1} x {0,2}");
}

void ModelSystem::validate() const {
  if (hamiltonian.rows() != hamiltonian.cols()) throw DimensionError("ModelSystem: Hamiltonian must be square");
  dims.require_total(hamiltonian.rows());
  const double defect = (hamiltonian - hamiltonian.adjoint()).norm();
  if (defect > 1e-12 * std::max(1.0, hamiltonian.norm())) {
    std::ostringstream msg;
    msg << "ModelSystem: Hamiltonian is not Hermitian (defect " << defect << ")";
    throw NumericalError(msg.str());
  }
  for (const auto& c : collapse_ops) {
    if (c.rows() != hamiltonian.rows() || c.cols() != hamiltonian.cols()) {
      throw DimensionError("ModelSystem: collapse operator dimension differs from the Hamiltonian");
    }
  }
  if (basis_labels.size() != dims.count()) throw DimensionError("ModelSystem: one label list per subsystem");
  for (std::size_t k = 0; k < dims.count(); ++k) {
    if (static_cast<int>(basis_labels[k].size()) != dims[k]) {
      throw DimensionError("ModelSystem: label count differs from subsystem dimension");
    }
  }
}

int ModelSystem::level_index(std::size_t k, const std::string& label) const {
  if (k >= basis_labels.size()) throw DimensionError("ModelSystem: subsystem index out of range");
  const auto& labels = basis_labels[k];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  throw ConfigError("unknown level label '" + label + "'");
}

ModelSystem restrict_levels(const ModelSystem& model, const std::vector<int>& levels) {
  const int d = model.dim();
  const int n = static_cast<int>(levels.size());
  if (n == 0) throw DimensionError("restrict_levels: empty level list");
  ComplexMatrix iso = ComplexMatrix::Zero(d, n);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    if (levels[i] < 0 || levels[i] >= d) throw DimensionError("restrict_levels: level index out of range");
    iso(levels[i], i) = 1.0;
    // Decompose the joint index back into per-subsystem labels.
    int rem = levels[i];
    std::string label;
    for (std::size_t k = model.dims.count(); k-- > 0;) {
      const int digit = rem % model.dims[k];
      rem /= model.dims[k];
      label = model.basis_labels[k][digit] + (label.empty() ? "" : "," + label);
    }
    labels.push_back(label);
  }
  ModelSystem out;
  out.hamiltonian = iso.adjoint() * model.hamiltonian * iso;
  for (const auto& c : model.collapse_ops) {
    ComplexMatrix r = iso.adjoint() * c * iso;
    if (r.norm() > 0.0) out.collapse_ops.push_back(std::move(r));
  }
  out.dims = SubsystemDims({n});
  out.basis_labels = {labels};
  return out;
}

namespace {

ComplexMatrix ketbra(int d, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

// Adds c|i><j| + conj(c)|j><i|.
void add_coupling(ComplexMatrix& h, int i, int j, Complex c) {
  h(i, j) += c;
  h(j, i) += std::conj(c);
}

}  // namespace

ModelSystem build_single_atom(const AtomParams& p) {
  using namespace single_atom;
  p.validate();
  ModelSystem m;
  m.hamiltonian = ComplexMatrix::Zero(kDim, kDim);
  m.hamiltonian(kIntermediate, kIntermediate) = p.delta;
  add_coupling(m.hamiltonian, kGround1, kIntermediate, p.omega1);
  add_coupling(m.hamiltonian, kIntermediate, kRydberg, p.omega2);
  add_coupling(m.hamiltonian, kGround0, kGround1, p.omega_mw);

  m.collapse_ops = {
      std::sqrt(p.gamma_r / 2.0) * ketbra(kDim, kGround1, kRydberg),
      std::sqrt(p.gamma_r / 2.0) * ketbra(kDim, kIntermediate, kRydberg),
      std::sqrt(p.gamma_p) * ketbra(kDim, kGround1, kIntermediate),
  };
  m.dims = SubsystemDims({kDim});
  m.basis_labels = {{"0", "1", "p", "R"}};
  return m;
}

namespace two_atom {

int intermediate_of(int atom, int ground) {
  if (ground == kGround0) return kIntermediate0;
  if ((atom == 1 && ground == kGround1) || (atom == 2 && ground == kGround2)) return kIntermediateX;
  throw DimensionError("two_atom: ground level is not laser-coupled on this atom");
}

int rydberg_of(int atom, int ground) {
  if (ground == kGround0) return kRydberg0;
  if ((atom == 1 && ground == kGround1) || (atom == 2 && ground == kGround2)) return kRydbergX;
  throw DimensionError("two_atom: ground level is not laser-coupled on this atom");
}

SubsystemDims dims() { return SubsystemDims({kLocalDim, kLocalDim}); }

}  // namespace two_atom

namespace {

ComplexMatrix local_two_atom_hamiltonian(const AtomParams& p, int atom, double microwave) {
  using namespace two_atom;
  ComplexMatrix h = ComplexMatrix::Zero(kLocalDim, kLocalDim);
  const int driven_ground = atom == 1 ? kGround1 : kGround2;
  for (int g : {kGround0, driven_ground}) {
    const int pl = intermediate_of(atom, g);
    const int rl = rydberg_of(atom, g);
    h(pl, pl) += p.delta;
    add_coupling(h, g, pl, p.omega1);
    add_coupling(h, pl, rl, p.omega2);
  }
  add_coupling(h, kGround0, kGround2, microwave);
  add_coupling(h, kGround0, kGround1, microwave);
  return h;
}

}  // namespace

ModelSystem build_two_atom(const AtomParams& p, const RRIMatrix& v) {
  using namespace two_atom;
  p.validate();
  const ComplexMatrix id = ComplexMatrix::Identity(kLocalDim, kLocalDim);

  ModelSystem m;
  m.hamiltonian = kron(local_two_atom_hamiltonian(p, 1, p.omega_mw), id) +
                  kron(id, local_two_atom_hamiltonian(p, 2, -p.omega_mw));
  for (int a1 : {kGround0, kGround1}) {
    for (int a2 : {kGround0, kGround2}) {
      const int r = joint(rydberg_of(1, a1), rydberg_of(2, a2));
      m.hamiltonian(r, r) += v.at(a1, a2);
    }
  }

  // Each Rydberg / intermediate level decays with rate gamma/3 into each
  // ground level of its own atom.
  const std::array<std::pair<int, double>, 4> decay_sources = {
      std::pair{kRydberg0, p.gamma_r}, std::pair{kRydbergX, p.gamma_r}, std::pair{kIntermediate0, p.gamma_p},
      std::pair{kIntermediateX, p.gamma_p}};
  for (int atom : {1, 2}) {
    for (const auto& [level, gamma] : decay_sources) {
      for (int j : {kGround0, kGround1, kGround2}) {
        const ComplexMatrix local = std::sqrt(gamma / 3.0) * ketbra(kLocalDim, j, level);
        m.collapse_ops.push_back(atom == 1 ? kron(local, id) : kron(id, local));
      }
    }
  }

  m.dims = dims();
  m.basis_labels = {{"0", "1", "2", "p0", "p1", "R0", "R1"}, {"0", "1", "2", "p0", "p2", "R0", "R2"}};
  return m;
}

ComplexMatrix ladder_hamiltonian(double omega1, double omega2, double delta) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(1, 1) = delta;
  add_coupling(h, 0, 1, omega1);
  add_coupling(h, 1, 2, omega2);
  return h;
}

namespace {

void require_drive(double omega1, double omega2) {
  if (omega1 == 0.0 && omega2 == 0.0) {
    throw ConfigError("dark state undefined: both Rabi frequencies are zero");
  }
}

}  // namespace

StateVector single_atom_dark_state(double omega1, double omega2) {
  require_drive(omega1, omega2);
  ComplexVector v = ComplexVector::Zero(single_atom::kDim);
  v(single_atom::kGround1) = omega2;
  v(single_atom::kRydberg) = -omega1;
  return StateVector::normalize(std::move(v));
}

StateVector dark_state(double omega1, double omega2, int j) {
  require_drive(omega1, omega2);
  if (j < 0 || j > 2) throw DimensionError("dark_state: ground index must be 0, 1 or 2");
  ComplexVector v = ComplexVector::Zero(two_atom::kLocalDim);
  v(j) = omega2;
  v(j == 0 ? two_atom::kRydberg0 : two_atom::kRydbergX) = -omega1;
  return StateVector::normalize(std::move(v));
}

DressedBasis dressed_basis(const AtomParams& p) {
  using namespace single_atom;
  const double dt = std::sqrt(p.delta * p.delta + 4.0 * p.omega1 * p.omega1 + 4.0 * p.omega2 * p.omega2);
  if (!(dt > 0.0)) throw ConfigError("dressed_basis: degenerate ladder (omega1 = omega2 = delta = 0)");

  auto zeta = [&](double sign, double& norm) {
    ComplexVector v = ComplexVector::Zero(kDim);
    v(kGround1) = 2.0 * p.omega1;
    v(kIntermediate) = p.delta + sign * dt;
    v(kRydberg) = 2.0 * p.omega2;
    norm = v.norm();
    return StateVector::normalize(std::move(v));
  };
  double n_plus = 0.0, n_minus = 0.0;
  StateVector zp = zeta(+1.0, n_plus);
  StateVector zm = zeta(-1.0, n_minus);
  return DressedBasis{single_atom_dark_state(p.omega1, p.omega2),
                      zp,
                      zm,
                      0.0,
                      0.5 * (p.delta + dt),
                      0.5 * (p.delta - dt),
                      dt,
                      n_plus,
                      n_minus};
}

namespace {

ComplexVector local_basis(int level) {
  ComplexVector v = ComplexVector::Zero(two_atom::kLocalDim);
  v(level) = 1.0;
  return v;
}

}  // namespace

StateVector target_state(double omega1, double omega2, DarkTarget which) {
  using namespace two_atom;
  const ComplexVector d0 = dark_state(omega1, omega2, 0).amplitudes();
  const ComplexVector d1 = dark_state(omega1, omega2, 1).amplitudes();
  const ComplexVector d2 = dark_state(omega1, omega2, 2).amplitudes();
  const ComplexVector g1 = local_basis(kGround1);
  const ComplexVector g2 = local_basis(kGround2);

  ComplexVector v;
  switch (which) {
    case DarkTarget::kMain:
      v = kron(d0, d0) + kron(d1, g1) + kron(g2, d2);
      break;
    case DarkTarget::kD1:
      v = kron(d0, d0) + kron(d1, d2) + kron(g2, g1);
      break;
    case DarkTarget::kD2:
      v = kron(d0, g1) + kron(d0, d2) + kron(d1, d0) + kron(g2, d0);
      break;
  }
  return StateVector::normalize(std::move(v));
}

StateVector ground_entangled_state() {
  using namespace two_atom;
  ComplexVector v = ComplexVector::Zero(kDim);
  for (int j : {kGround0, kGround1, kGround2}) v(joint(j, j)) = 1.0;
  return StateVector::normalize(std::move(v));
}

DensityMatrix initial_mixed_state() {
  using namespace two_atom;
  ComplexMatrix rho = ComplexMatrix::Zero(kDim, kDim);
  for (int a : {kGround0, kGround1, kGround2}) {
    for (int b : {kGround0, kGround1, kGround2}) rho(joint(a, b), joint(a, b)) = 1.0 / 9.0;
  }
  return DensityMatrix(std::move(rho), dims());
}

}  // namespace rydsim
