#pragma once

#include <cstddef>
#include <vector>

#include "dlab/core_state.hpp"

namespace dlab {

/// Newtonian viscous regularization eps * div S with
/// S = 2 mu D0(u) + eta div(u) I, D0 the trace-free symmetric gradient.
///
/// epsilon = 0 switches the physical viscosity off; the numerical flux then
/// provides the only regularization (used for inviscid reference runs).
struct ViscosityModel {
  double epsilon = 1e-2;
  double shear_mu = 1.0;
  double bulk_eta = 1.0;

  void validate() const;
};

enum class FluxKind { Rusanov, CentralDissipative };
enum class TimeScheme { Euler, Rk2 };

struct SolverConfig {
  double cfl = 0.4;
  double end_time = 0.2;
  FluxKind flux = FluxKind::Rusanov;
  TimeScheme time_scheme = TimeScheme::Rk2;
  /// Snapshot cadence in time units; steps are clipped to land on multiples.
  double output_stride = 0.01;
  double dt_min = 1e-12;
  double density_floor = kDefaultDensityFloor;

  void validate() const;
};

/// Discrete energy balance of a run, one row per accepted step plus t = 0.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> energy;
  /// Cumulative eps * int int S : D u.
  std::vector<double> dissipation;
  /// E(0) - E(t) - dissipation(t).
  std::vector<double> slack;

  void append(double t, double e, double cumulative_dissipation);
  std::size_t size() const { return times.size(); }
  double initial_energy() const { return energy.empty() ? 0.0 : energy.front(); }
  double min_slack() const;
  double max_energy() const;
  bool dissipation_monotone() const;
  /// Linear interpolation of the cumulative dissipation.
  double dissipation_at(double t) const;
};

struct RunResult {
  Trajectory trajectory;
  EnergyLedger ledger;
  std::size_t steps = 0;
  std::size_t rejections = 0;
};

Sym2 viscous_stress(const Mat2& grad_u, const ViscosityModel& model, int dim);

/// Potential F(D) = mu |D0|^2 + eta/2 (tr D)^2 and its convex conjugate.
/// gap = S:D - F(D) - F*(S) <= 0, with equality iff S = viscous_stress(D).
struct FenchelTerms {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

double fenchel_primal(const Sym2& D, const ViscosityModel& model, int dim);
double fenchel_dual(const Sym2& S, const ViscosityModel& model, int dim);
FenchelTerms fenchel_decomposition(const Sym2& D, const Sym2& S, const ViscosityModel& model,
                                   int dim);

/// Cell-centred velocity gradients by periodic central differences.
std::vector<Mat2> velocity_gradients(const ConservedField& field,
                                     double floor = kDefaultDensityFloor);

/// eps * sum_cells S(grad u) : grad u * cell volume; never negative.
double viscous_dissipation_rate(const ConservedField& field, const ViscosityModel& model,
                                double floor = kDefaultDensityFloor);

double stable_dt(const ConservedField& field, const EosParams& eos, const ViscosityModel& model,
                 double cfl);

struct StepOutcome {
  ConservedField field;
  /// Viscous dissipation accumulated over the step.
  double dissipation = 0.0;
};

/// One step of the chosen time scheme. Throws TimestepRejection if any stage
/// produces negative density.
StepOutcome advance(const ConservedField& field, const EosParams& eos,
                    const ViscosityModel& model, double dt, FluxKind flux, TimeScheme scheme,
                    double floor = kDefaultDensityFloor);

ConservedField step(const ConservedField& field, const EosParams& eos,
                    const ViscosityModel& model, double dt, FluxKind flux = FluxKind::Rusanov,
                    TimeScheme scheme = TimeScheme::Rk2);

/// Integrates to config.end_time, halving dt on rejection. Throws
/// SolverStallError once dt falls below config.dt_min.
RunResult run(const ConservedField& initial, const EosParams& eos, const ViscosityModel& model,
              const SolverConfig& config);

}  // namespace dlab
