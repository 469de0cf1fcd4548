#pragma once

#include <string>
#include <vector>

#include "dlab/defect_estimator.hpp"
#include "dlab/viscous_solver.hpp"

namespace dlab {

/// A candidate dissipative solution: fields, defects at every snapshot and
/// the energy ledger, plus a free-form note on how it was generated.
struct DissipativeRecord {
  Trajectory trajectory;
  std::vector<DefectField> defects;
  EnergyLedger ledger;
  std::string provenance;

  const TorusGrid& grid() const { return trajectory.grid(); }
  std::vector<double> times() const { return trajectory.times(); }
  /// Defect energy 1/2 tr Rv + Rp / (gamma - 1) integrated at snapshot k.
  double defect_energy(std::size_t k, const EosParams& eos) const;
  /// Largest defect energy over all snapshots.
  double defect_mass(const EosParams& eos) const;
};

/// Record built from a run. With H = 1 the fields are kept and defects are
/// zero. With H > 1 the fields are averaged with the given partition and the
/// averaging defects are attached; the ledger energy is shifted so that
/// ledger + defect energy still equals the run's energy.
DissipativeRecord make_record(const RunResult& run, const EosParams& eos, int block = 1,
                              AveragingMode mode = AveragingMode::Block,
                              const std::string& provenance = "");

struct RecordAudit {
  bool defects_ok = false;
  bool energy_ok = false;
  bool shapes_ok = false;
  double min_energy_slack = 0.0;
  std::vector<std::string> problems;

  bool ok() const { return defects_ok && energy_ok && shapes_ok; }
};

/// Defect positivity at every snapshot and the energy inequality for all
/// snapshot pairs (constant and polynomial envelopes).
RecordAudit audit_record(const DissipativeRecord& record, const EosParams& eos);

/// Periodic: central differences with wrap. Open: the cube without wrap,
/// one-sided differences in the first and last cell of each axis.
enum class Boundary { Periodic, Open };

/// max over cells of -lambda_min(sym grad u): the smallest d making
/// D u + d I positive semidefinite.
double one_sided_lipschitz_d(const std::vector<Vec2>& velocity, const TorusGrid& grid,
                             Boundary boundary = Boundary::Periodic);
double one_sided_lipschitz_d(const ConservedField& field, double floor = kDefaultDensityFloor);

struct GronwallReport {
  std::vector<double> times;
  std::vector<double> defect;    // D(t)
  std::vector<double> bound;     // D(t0) exp(C int_{t0}^t max(d, 0))
  std::vector<double> d_osl;     // d(t) at snapshots
  double constant = 0.0;         // C
  double tolerance = 0.0;
  double vacuum_fraction = 0.0;  // largest fraction of cells below the floor
  bool pass = false;
  std::string warning;
};

/// Checks D(t) <= D(t0) exp(C int d) on snapshots in [t0, t1] with
/// C = max(2, dim (gamma - 1)); passes within 1e-6 E(0).
GronwallReport gronwall_defect_bound(const DissipativeRecord& record, const EosParams& eos,
                                     double t0, double t1, double floor = kDefaultDensityFloor);

enum class Verdict { Classical, Dissipative };

struct CompatibilityOptions {
  double density_floor = 1e-3;
  /// Largest neighbor jump allowed, relative to the field's range.
  double jump_ratio = 0.1;
  double defect_tolerance = 1e-6;
};

struct CompatibilityReport {
  Verdict verdict = Verdict::Dissipative;
  double min_density = 0.0;
  double max_jump_ratio = 0.0;
  double d_integral = 0.0;
  double defect_mass = 0.0;
  double initial_energy = 0.0;
  std::vector<std::string> violated;
};

CompatibilityReport compatibility_check(const DissipativeRecord& record, const EosParams& eos,
                                        const CompatibilityOptions& options = {});

const char* to_string(Verdict v);

struct BesovReport {
  double lq_norm = 0.0;
  double seminorm = 0.0;
  double value = 0.0;  // lq_norm + seminorm
  /// Shift attaining the sup: axis (0, 1, or 2 for time) and size in units.
  int best_axis = -1;
  double best_shift = 0.0;
};

/// ||v||_q + sup_xi ||v(. + xi) - v||_q / |xi|^alpha over axis-aligned grid
/// shifts up to half the period. q = kInfinity gives the sup norm.
BesovReport besov_seminorm(const std::vector<double>& values, const TorusGrid& grid, double alpha,
                           double q);

/// Space-time version over equally spaced samples; time shifts do not wrap.
BesovReport besov_seminorm_spacetime(const std::vector<std::vector<double>>& samples,
                                     double dt, const TorusGrid& grid, double alpha, double q);

/// int 1/2 rho |m/rho - U|^2 + P(rho) - P'(r)(rho - r) - P(r).
double relative_energy(const ConservedField& field, const std::vector<double>& r,
                       const std::vector<Vec2>& U, const EosParams& eos, double r_min = 1e-8);
double relative_energy(const ConservedField& field, const ConservedField& reference,
                       const EosParams& eos, double r_min = 1e-8);

struct GapOptions {
  double initial_tolerance = 1e-10;
  bool require_initial_match = true;
  /// Added to gap(0) in the growth-rate fit.
  double consistency = 0.0;
};

struct GapCurve {
  std::vector<double> times;
  std::vector<double> relative;
  std::vector<double> defect;
  std::vector<double> gap;
  /// Smallest Lambda with gap(t) <= (gap(0) + consistency) exp(Lambda t);
  /// -infinity if the gap vanishes identically.
  double lambda = 0.0;
  double initial_mismatch = 0.0;
  double reference_d_integral = 0.0;
  double reference_besov = 0.0;
};

/// Relative energy of the record against a reference trajectory at every
/// common snapshot time, plus the record's defect energy.
GapCurve weak_strong_gap(const DissipativeRecord& record, const Trajectory& reference,
                         const EosParams& eos, const GapOptions& options = {});

}  // namespace dlab
