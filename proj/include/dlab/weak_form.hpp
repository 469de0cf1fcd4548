#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlab/core_state.hpp"
#include "dlab/defect_estimator.hpp"
#include "dlab/viscous_solver.hpp"

namespace dlab {

/// Time envelope psi(t) = (1 - t/T)^power on [0, T]; power 0 is psi = 1.
/// psi >= 0, psi(0) = 1, and psi(T) = 0 for power >= 1.
struct Envelope {
  int power = 2;
  double horizon = 1.0;

  double value(double t) const;
  double derivative(double t) const;
  std::string id() const { return "p" + std::to_string(power); }
};

/// Tensor trigonometric mode f_x(pi kx x) f_y(pi ky y), f = cos or sin.
struct SpatialMode {
  int kx = 0;
  int ky = 0;
  bool sine_x = false;
  bool sine_y = false;

  bool constant() const { return kx == 0 && ky == 0; }
  int max_wavenumber() const { return std::max(kx, ky); }
  std::string id(int dim) const;
};

double mode_value(const SpatialMode& m, const Vec2& x, int dim);
Vec2 mode_gradient(const SpatialMode& m, const Vec2& x, int dim);

/// A test function discretized for one grid: exact cell integrals of phi and
/// grad phi times a time envelope. `component` selects the momentum
/// component for vector tests and is -1 for scalar tests.
struct CellTest {
  std::string id;
  std::vector<double> phi;
  std::vector<Vec2> grad;
  Envelope envelope;
  int component = -1;
  bool constant = false;

  CellTest& operator+=(const CellTest& o);
  CellTest& operator*=(double s);
};

class TestFunctionBank {
 public:
  /// Modes 0..max_mode per axis (sin at wavenumber 0 omitted) times envelopes
  /// with powers 2..envelopes+1.
  TestFunctionBank(int dim, double horizon, int max_mode = 3, int envelopes = 2);

  int dim() const { return dim_; }
  double horizon() const { return horizon_; }
  int max_mode() const { return max_mode_; }
  const std::vector<SpatialMode>& modes() const { return modes_; }
  const std::vector<Envelope>& envelopes() const { return envelopes_; }

  std::size_t scalar_count() const { return modes_.size() * envelopes_.size(); }
  std::size_t vector_count() const { return scalar_count() * static_cast<std::size_t>(dim_); }

  CellTest scalar_test(std::size_t i, const TorusGrid& grid) const;
  CellTest vector_test(std::size_t i, const TorusGrid& grid) const;

  /// Pointwise evaluation of scalar member i.
  double value(std::size_t i, const Vec2& x, double t) const;
  Vec2 gradient(std::size_t i, const Vec2& x, double t) const;
  double time_derivative(std::size_t i, const Vec2& x, double t) const;

  std::string describe() const;

 private:
  const SpatialMode& mode_of(std::size_t i) const { return modes_[i / envelopes_.size()]; }
  const Envelope& envelope_of(std::size_t i) const { return envelopes_[i % envelopes_.size()]; }

  int dim_;
  double horizon_;
  int max_mode_;
  std::vector<SpatialMode> modes_;
  std::vector<Envelope> envelopes_;
};

struct ResidualEntry {
  std::string id;
  double residual = 0.0;
  /// |residual - residual using every other snapshot|.
  double quadrature_estimate = 0.0;
  bool constant = false;
  int max_wavenumber = 0;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double max_abs = 0.0;
  std::string bank;
  double tau = 0.0;
  /// Largest gap between consecutive snapshots used.
  double snapshot_spacing = 0.0;

  void add(ResidualEntry e);
};

/// [<rho, phi>]_0^tau - int_0^tau <rho, d_t phi> + <m, grad phi> dt.
ResidualReport continuity_residual(const Trajectory& traj, const TestFunctionBank& bank, double tau);
double continuity_residual(const Trajectory& traj, const CellTest& test, double tau);

/// Momentum counterpart with flux m (x) m / rho + p I, plus Rv + Rp I when
/// `defects` (one field per snapshot, on the trajectory grid) is given.
ResidualReport momentum_residual(const Trajectory& traj, const TestFunctionBank& bank, double tau,
                                 const EosParams& eos,
                                 const std::vector<DefectField>* defects = nullptr);
double momentum_residual(const Trajectory& traj, const CellTest& test, double tau,
                         const EosParams& eos, const std::vector<DefectField>* defects = nullptr);

/// eps int_0^tau <S, grad phi> dt for every vector test, evaluated directly
/// from the discrete stress.
ResidualReport viscous_pairing(const Trajectory& traj, const TestFunctionBank& bank, double tau,
                               const ViscosityModel& model, double floor = kDefaultDensityFloor);

struct EnvelopeSlack {
  std::string envelope;
  double min_slack = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

struct EnergySlackReport {
  std::vector<EnvelopeSlack> envelopes;
  double min_slack = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Energy inequality for every snapshot pair tau1 <= tau2 and every envelope
/// of the bank plus psi = 1:
///   int_{tau1}^{tau2} psi' E dt - [psi E]_{tau1}^{tau2} >= -1e-6 E(0),
/// where E is the ledger energy plus the defect energy (interpolated between
/// snapshots) when defects are given.
EnergySlackReport energy_inequality_check(const Trajectory& traj, const EnergyLedger& ledger,
                                          const TestFunctionBank& bank, const EosParams& eos,
                                          const std::vector<DefectField>* defects = nullptr);

/// Ledger with one row per snapshot and zero dissipation.
EnergyLedger ledger_from_snapshots(const Trajectory& traj, const EosParams& eos);

struct ConsistencyRow {
  std::size_t member = 0;
  double epsilon = 0.0;
  std::string kind;  // "E1", "E2" or "E3"
  std::string id;
  double value = 0.0;
};

struct ConsistencyTable {
  std::vector<ConsistencyRow> rows;
  /// Per kind, every test function decays monotonically along the sweep.
  bool e1_monotone = false;
  bool e2_monotone = false;
  bool e3_monotone = false;
  /// Fitted on the coarsest member: max E3[psi] / sup|psi|.
  double c_bound = 0.0;
  bool c_bounds_all = false;
  double initial_energy = 0.0;
  std::vector<std::string> violations;
};

/// Consistency errors for a sweep (sorted by decreasing epsilon) evaluated at
/// tau = bank horizon. Needs at least three members sharing the bank horizon
/// as a snapshot time.
ConsistencyTable consistency_sweep(const std::vector<SequenceMember>& members,
                                   const TestFunctionBank& bank, const EosParams& eos);

}  // namespace dlab
