#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rydsim/dynamics.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {

const std::vector<double>& TimeSeries::column(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return columns[k];
  }
  throw ConfigError("TimeSeries: no column named '" + std::string(name) + "'");
}

bool TimeSeries::has_column(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

// Re-Hermitizes each sampled state, enforces the trace / positivity guards
// and evaluates the observables.
class SampleRecorder {
 public:
  SampleRecorder(SubsystemDims dims, std::span<const Observable> observables, const EvolveOptions& options,
                 TimeSeries& out)
      : dims_(std::move(dims)), observables_(observables), options_(options), out_(out) {
    for (const auto& o : observables_) out_.names.push_back(o.name);
    out_.columns.assign(observables_.size(), {});
  }

  void record(double t, ComplexMatrix& rho) {
    auto& diag = out_.diagnostics;
    if (!rho.allFinite()) throw NumericalError(context(t) + "state contains non-finite entries");
    const double defect = (rho - rho.adjoint()).norm();
    diag.max_hermiticity_defect = std::max(diag.max_hermiticity_defect, defect);
    if (defect > 1e-12) ++diag.hermitization_corrections;
    rho = hermitian_part(rho);

    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    diag.max_trace_drift = std::max(diag.max_trace_drift, drift);
    if (drift > options_.trace_abort) {
      std::ostringstream msg;
      msg << context(t) << "propagation diverging: |Tr rho - 1| = " << drift << " exceeds " << options_.trace_abort;
      throw NumericalError(msg.str());
    }
    if (options_.check_positivity) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
      const double lo = solver.eigenvalues()(0);
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, lo);
      if (lo < -options_.positivity_abort) {
        std::ostringstream msg;
        msg << context(t) << "state lost positivity: minimum eigenvalue " << lo;
        throw NumericalError(msg.str());
      }
    }
    diag.max_purity = std::max(diag.max_purity, (rho * rho).trace().real());

    out_.times.push_back(t);
    if (!observables_.empty()) {
      const DensityMatrix state(rho, dims_);
      for (std::size_t k = 0; k < observables_.size(); ++k) out_.columns[k].push_back(observables_[k].evaluate(state));
    }
  }

  void finish(const ComplexMatrix& rho) { out_.final_state.emplace(rho, dims_); }

 private:
  static std::string context(double t) {
    std::ostringstream msg;
    msg << "at t = " << t << " us: ";
    return msg.str();
  }

  SubsystemDims dims_;
  std::span<const Observable> observables_;
  const EvolveOptions& options_;
  TimeSeries& out_;
};

struct SampleGrid {
  long full_steps = 0;
  double remainder = 0.0;  // length of a final shorter step, 0 when none
};

SampleGrid make_grid(double t_final, double sample_dt) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (!(sample_dt > 0.0) || !std::isfinite(sample_dt)) throw ConfigError("sample_dt must be positive");
  SampleGrid g;
  g.full_steps = static_cast<long>(std::floor(t_final / sample_dt + 1e-9));
  g.remainder = t_final - static_cast<double>(g.full_steps) * sample_dt;
  if (g.remainder <= 1e-9 * sample_dt) g.remainder = 0.0;
  return g;
}

void check_initial(const ModelSystem& model, const DensityMatrix& rho0) {
  model.validate();
  if (rho0.dim() != model.dim()) {
    std::ostringstream msg;
    msg << "initial state has dimension " << rho0.dim() << " but the model has " << model.dim();
    throw DimensionError(msg.str());
  }
  rho0.check_physical();
}

}  // namespace

TimeSeries evolve(const ModelSystem& model, const DensityMatrix& rho0, double t_final, double sample_dt,
                  std::span<const Observable> observables, const EvolveOptions& options) {
  check_initial(model, rho0);
  const SampleGrid grid = make_grid(t_final, sample_dt);
  const int d = model.dim();
  const Liouvillian l = build_liouvillian(model);

  TimeSeries out;
  SampleRecorder recorder(rho0.dims(), observables, options, out);
  ComplexMatrix rho = rho0.matrix();
  recorder.record(0.0, rho);

  ComplexVector v = vectorize(rho);
  ComplexVector next(v.size());
  if (grid.full_steps > 0) {
    const ComplexMatrix step = expm(l.superop * sample_dt);
    for (long k = 1; k <= grid.full_steps; ++k) {
      next.noalias() = step * v;
      v.swap(next);
      ++out.diagnostics.propagation_steps;
      rho = unvectorize(v, d);
      recorder.record(static_cast<double>(k) * sample_dt, rho);
      v = vectorize(rho);
    }
  }
  if (grid.remainder > 0.0) {
    const ComplexMatrix step = expm(l.superop * grid.remainder);
    next.noalias() = step * v;
    v.swap(next);
    ++out.diagnostics.propagation_steps;
    rho = unvectorize(v, d);
    recorder.record(t_final, rho);
  }
  recorder.finish(rho);
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                 kB6 = 11.0 / 84.0;
constexpr double kE1 = kB1 - 5179.0 / 57600.0, kE3 = kB3 - 7571.0 / 16695.0, kE4 = kB4 - 393.0 / 640.0,
                 kE5 = kB5 + 92097.0 / 339200.0, kE6 = kB6 - 187.0 / 2100.0, kE7 = -1.0 / 40.0;

}  // namespace

TimeSeries evolve_rk(const ModelSystem& model, const DensityMatrix& rho0, double t_final, double sample_dt,
                     std::span<const Observable> observables, const RkOptions& rk, const EvolveOptions& options) {
  check_initial(model, rho0);
  const SampleGrid grid = make_grid(t_final, sample_dt);
  const LindbladKernel f(model);
  const int d = model.dim();

  TimeSeries out;
  SampleRecorder recorder(rho0.dims(), observables, options, out);
  ComplexMatrix y = rho0.matrix();
  recorder.record(0.0, y);

  ComplexMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d), stage(d, d), y_new(d, d);
  double t = 0.0;
  double h = 0.1 / std::max(1e-300, f.norm_bound());
  f.apply(y, k1);

  const long samples = grid.full_steps + (grid.remainder > 0.0 ? 1 : 0);
  for (long s = 1; s <= samples; ++s) {
    const double t_next = s <= grid.full_steps ? static_cast<double>(s) * sample_dt : t_final;
    while (t < t_next) {
      if (out.diagnostics.propagation_steps >= rk.max_steps) throw NumericalError("evolve_rk: step budget exhausted");
      const bool last = t + h >= t_next;
      const double step = last ? t_next - t : h;

      stage = y + step * kA21 * k1;
      f.apply(stage, k2);
      stage = y + step * (kA31 * k1 + kA32 * k2);
      f.apply(stage, k3);
      stage = y + step * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      f.apply(stage, k4);
      stage = y + step * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      f.apply(stage, k5);
      stage = y + step * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      f.apply(stage, k6);
      y_new = y + step * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      f.apply(y_new, k7);

      const ComplexMatrix err = step * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
      const double scale = rk.atol + rk.rtol * std::max(y.cwiseAbs().maxCoeff(), y_new.cwiseAbs().maxCoeff());
      const double e = err.cwiseAbs().maxCoeff() / scale;
      if (!std::isfinite(e)) throw NumericalError("evolve_rk: non-finite error estimate");

      if (e <= 1.0) {
        t = last ? t_next : t + step;
        y.swap(y_new);
        k1.swap(k7);
        ++out.diagnostics.propagation_steps;
      }
      const double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      // A clamped final step says nothing about the free step size.
      if (!(last && e <= 1.0)) h = step * factor;
    }
    recorder.record(t_next, y);
    f.apply(y, k1);
  }
  recorder.finish(y);
  return out;
}

PulseSchedule::PulseSchedule(Shape shape, double amplitude, double total_time)
    : shape_(shape), amplitude_(amplitude), total_time_(total_time) {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ConfigError("PulseSchedule: total time must be positive");
  if (!std::isfinite(amplitude)) throw ConfigError("PulseSchedule: amplitude must be finite");
}

PulseSchedule PulseSchedule::constant(double amplitude, double total_time) {
  return PulseSchedule(Shape::kConstant, amplitude, total_time);
}

PulseSchedule PulseSchedule::cosine_ramp(double amplitude, double total_time) {
  return PulseSchedule(Shape::kCosineRamp, amplitude, total_time);
}

double PulseSchedule::operator()(double tau) const {
  switch (shape_) {
    case Shape::kConstant:
      return amplitude_;
    case Shape::kCosineRamp:
      if (tau >= total_time_) return 0.0;
      if (tau <= 0.0) return amplitude_;
      return amplitude_ * std::cos(std::numbers::pi * tau / (2.0 * total_time_));
  }
  return amplitude_;
}

ComplexMatrix propagate_matrix_free(const LindbladKernel& kernel, const ComplexMatrix& rho, double t) {
  if (t < 0.0) throw ConfigError("propagate_matrix_free: negative time");
  if (t == 0.0) return rho;
  constexpr double kTheta = 4.0;
  constexpr int kMaxTerms = 80;
  const long substeps = std::max(1L, static_cast<long>(std::ceil(kernel.norm_bound() * t / kTheta)));
  const double h = t / static_cast<double>(substeps);

  const int d = kernel.dim();
  ComplexMatrix acc = rho, term(d, d), next(d, d);
  for (long s = 0; s < substeps; ++s) {
    term = acc;
    int small = 0;
    for (int k = 1; k <= kMaxTerms; ++k) {
      kernel.apply(term, next);
      term = (h / k) * next;
      acc += term;
      // Two consecutive negligible terms: the tail is below round-off.
      if (term.norm() <= 1e-17 * acc.norm()) {
        if (++small == 2) break;
      } else {
        small = 0;
      }
    }
  }
  return acc;
}

namespace {

constexpr int kDenseIntervalMaxDim = 16;

TimeSeries run_piecewise(const ModelBuilder& builder, const PulseSchedule& schedule, const DensityMatrix& rho0,
                         const SampleGrid& grid, double t_final, double sample_dt, int subintervals,
                         std::span<const Observable> observables, const EvolveOptions& options) {
  TimeSeries out;
  SampleRecorder recorder(rho0.dims(), observables, options, out);
  ComplexMatrix rho = rho0.matrix();
  recorder.record(0.0, rho);
  const int d = rho0.dim();

  auto advance = [&](double t0, double length) {
    const double piece = length / subintervals;
    for (int i = 0; i < subintervals; ++i) {
      const double mid = t0 + (i + 0.5) * piece;
      const ModelSystem model = builder(schedule(mid));
      if (model.dim() != d) throw DimensionError("evolve_timedep: builder changed the model dimension");
      if (d <= kDenseIntervalMaxDim) {
        const ComplexMatrix step = expm(build_liouvillian(model).superop * piece);
        rho = unvectorize(step * vectorize(rho), d);
      } else {
        rho = propagate_matrix_free(LindbladKernel(model), rho, piece);
      }
      ++out.diagnostics.propagation_steps;
    }
  };

  for (long k = 1; k <= grid.full_steps; ++k) {
    advance(static_cast<double>(k - 1) * sample_dt, sample_dt);
    recorder.record(static_cast<double>(k) * sample_dt, rho);
  }
  if (grid.remainder > 0.0) {
    advance(static_cast<double>(grid.full_steps) * sample_dt, grid.remainder);
    recorder.record(t_final, rho);
  }
  recorder.finish(rho);
  out.diagnostics.subintervals_per_sample = subintervals;
  return out;
}

double final_change(const TimeSeries& a, const TimeSeries& b) {
  if (a.columns.empty()) return (a.final_state->matrix() - b.final_state->matrix()).norm();
  double change = 0.0;
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    change = std::max(change, std::abs(a.columns[k].back() - b.columns[k].back()));
  }
  return change;
}

}  // namespace

TimeSeries evolve_timedep(const ModelBuilder& builder, const PulseSchedule& schedule, const DensityMatrix& rho0,
                          double t_final, double sample_dt, std::span<const Observable> observables,
                          const TimeDepOptions& timedep, const EvolveOptions& options) {
  const SampleGrid grid = make_grid(t_final, sample_dt);
  if (t_final > schedule.total_time() * (1.0 + 1e-12)) {
    throw ConfigError("evolve_timedep: schedule is not defined up to t_final");
  }
  if (timedep.initial_subintervals < 1) throw ConfigError("evolve_timedep: initial_subintervals must be >= 1");
  check_initial(builder(schedule(0.0)), rho0);

  int n = timedep.initial_subintervals;
  TimeSeries previous = run_piecewise(builder, schedule, rho0, grid, t_final, sample_dt, n, observables, options);
  long steps = previous.diagnostics.propagation_steps;
  double change = 0.0;
  for (int halving = 0; halving < timedep.max_halvings; ++halving) {
    n *= 2;
    TimeSeries current = run_piecewise(builder, schedule, rho0, grid, t_final, sample_dt, n, observables, options);
    steps += current.diagnostics.propagation_steps;
    change = final_change(previous, current);
    if (change < timedep.tolerance) {
      current.diagnostics.convergence_change = change;
      current.diagnostics.propagation_steps = steps;
      return current;
    }
    previous = std::move(current);
  }
  std::ostringstream msg;
  msg << "evolve_timedep: no convergence after " << timedep.max_halvings << " halvings (last change " << change
      << ", tolerance " << timedep.tolerance << ")";
  throw NumericalError(msg.str());
}

}  // namespace rydsim
