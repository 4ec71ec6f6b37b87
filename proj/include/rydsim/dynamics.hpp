#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "rydsim/model.hpp"
#include "rydsim/state.hpp"

namespace rydsim {

// Vectorization is column stacking: vec(A X B) = (B^T kron A) vec(X).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, int dim);

// -i[H, rho] + sum_j (L rho L^dagger - {L^dagger L, rho}/2)
ComplexMatrix lindblad_rhs(const ModelSystem& model, const ComplexMatrix& rho);
ComplexMatrix lindblad_rhs(const ModelSystem& model, const DensityMatrix& rho);

inline constexpr int kMaxLiouvillianHilbertDim = 64;

// Superoperator of the master equation acting on vec(rho):
//   L = -i(I kron H - H^T kron I)
//       + sum_j [conj(L_j) kron L_j - (I kron L_j^dag L_j + (L_j^dag L_j)^T kron I)/2]
struct Liouvillian {
  ComplexMatrix superop;
  int hilbert_dim = 0;
};

// Throws DimensionError above kMaxLiouvillianHilbertDim.
Liouvillian build_liouvillian(const ModelSystem& model);

// Sparse, precompiled right-hand side of the master equation for repeated
// evaluation (propagators that never form the superoperator).
class LindbladKernel {
 public:
  explicit LindbladKernel(const ModelSystem& model);

  // out = rhs(x); `out` must not alias `x`.
  void apply(const ComplexMatrix& x, ComplexMatrix& out) const;
  ComplexMatrix operator()(const ComplexMatrix& x) const;

  // Upper bound on the 1-norm of the superoperator.
  double norm_bound() const { return norm_bound_; }
  int dim() const { return dim_; }

 private:
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  using SparseRowMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  int dim_ = 0;
  SparseRowMatrix h_eff_;      // H - (i/2) sum L^dag L
  SparseRowMatrix h_eff_adj_;  // its adjoint
  std::vector<std::vector<Entry>> jumps_;
  double norm_bound_ = 0.0;
};

// Named scalar evaluated on the state at every sample time.
struct Observable {
  std::string name;
  std::function<double(const DensityMatrix&)> evaluate;
};

struct RunDiagnostics {
  double max_trace_drift = 0.0;          // max |Tr rho - 1| over samples
  double max_hermiticity_defect = 0.0;   // max ||rho - rho^dag||_F before re-Hermitizing
  int hermitization_corrections = 0;     // samples whose defect exceeded 1e-12
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_purity = 0.0;
  long propagation_steps = 0;            // matvecs, RK steps or interval exponentials
  int subintervals_per_sample = 1;       // time-dependent runs only
  double convergence_change = 0.0;       // time-dependent runs only
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // columns[k][i] pairs with times[i]
  std::optional<DensityMatrix> final_state;
  RunDiagnostics diagnostics;

  const std::vector<double>& column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

struct EvolveOptions {
  double trace_abort = 1e-5;        // abort when |Tr rho - 1| exceeds this
  double positivity_abort = 1e-7;   // abort when an eigenvalue drops below -this
  bool check_positivity = true;
};

// Time-independent propagation: P = exp(L sample_dt) is computed once and
// applied repeatedly. Samples at 0, sample_dt, ..., with a final shorter
// step when t_final is not a multiple of sample_dt.
TimeSeries evolve(const ModelSystem& model, const DensityMatrix& rho0, double t_final, double sample_dt,
                  std::span<const Observable> observables, const EvolveOptions& options = {});

struct RkOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 50'000'000;
};

// Adaptive Dormand-Prince 5(4) integration of the same equation; the
// independent cross-check for evolve().
TimeSeries evolve_rk(const ModelSystem& model, const DensityMatrix& rho0, double t_final, double sample_dt,
                     std::span<const Observable> observables, const RkOptions& rk = {},
                     const EvolveOptions& options = {});

// Scalar control waveform on [0, T].
class PulseSchedule {
 public:
  enum class Shape { kConstant, kCosineRamp };

  static PulseSchedule constant(double amplitude, double total_time);
  // amplitude * cos(pi tau / (2T)), exactly zero for tau >= T.
  static PulseSchedule cosine_ramp(double amplitude, double total_time);

  double operator()(double tau) const;
  Shape shape() const { return shape_; }
  double amplitude() const { return amplitude_; }
  double total_time() const { return total_time_; }

 private:
  PulseSchedule(Shape shape, double amplitude, double total_time);
  Shape shape_;
  double amplitude_;
  double total_time_;
};

using ModelBuilder = std::function<ModelSystem(double control)>;

struct TimeDepOptions {
  double tolerance = 1e-6;       // max change of final observables when halving
  int max_halvings = 8;
  int initial_subintervals = 1;  // per sample interval
};

// Piecewise-constant propagation: within each sub-interval the model is built
// at the midpoint control value and its exponential applied. The sub-interval
// count is doubled until the final observables (or, without observables, the
// final state in Frobenius norm) change by less than the tolerance.
TimeSeries evolve_timedep(const ModelBuilder& builder, const PulseSchedule& schedule, const DensityMatrix& rho0,
                          double t_final, double sample_dt, std::span<const Observable> observables,
                          const TimeDepOptions& timedep = {}, const EvolveOptions& options = {});

// exp(L t) rho for a fixed model without forming the superoperator
// (truncated Taylor series on scaled steps).
ComplexMatrix propagate_matrix_free(const LindbladKernel& kernel, const ComplexMatrix& rho, double t);

struct SteadyStateResult {
  int multiplicity = 0;
  std::vector<ComplexMatrix> basis;  // null vectors of L, reshaped
  std::optional<DensityMatrix> state;  // present when the steady state is unique
  double residual = std::numeric_limits<double>::quiet_NaN();  // ||rhs(rho_ss)||_F
  // Smallest |lambda| among the non-zero Liouvillian eigenvalues, when the
  // full spectrum was computed (small models); NaN otherwise.
  double gap = std::numeric_limits<double>::quiet_NaN();
  double rcond = std::numeric_limits<double>::quiet_NaN();  // bordered-system conditioning

  bool unique() const { return multiplicity == 1 && state.has_value(); }
  // Throws NumericalError naming the multiplicity when not unique.
  const DensityMatrix& require_unique() const;
};

SteadyStateResult steady_state(const ModelSystem& model);

}  // namespace rydsim
