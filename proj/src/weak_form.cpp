#include "dlab/weak_form.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace dlab {

double Envelope::value(double t) const {
  if (power == 0) return 1.0;
  const double s = std::max(0.0, 1.0 - t / horizon);
  return std::pow(s, power);
}

double Envelope::derivative(double t) const {
  if (power == 0) return 0.0;
  const double s = std::max(0.0, 1.0 - t / horizon);
  return -power * std::pow(s, power - 1) / horizon;
}

std::string SpatialMode::id(int dim) const {
  std::string s = (sine_x ? "s" : "c") + std::to_string(kx);
  if (dim == 2) s += (sine_y ? "s" : "c") + std::to_string(ky);
  return s;
}

namespace {

constexpr double kPi = std::numbers::pi;

double f1(int k, bool sine, double x) {
  return sine ? std::sin(kPi * k * x) : std::cos(kPi * k * x);
}

double df1(int k, bool sine, double x) {
  return sine ? kPi * k * std::cos(kPi * k * x) : -kPi * k * std::sin(kPi * k * x);
}

/// Exact integral of f1 over [lo, hi].
double int1(int k, bool sine, double lo, double hi) {
  if (k == 0) return sine ? 0.0 : hi - lo;
  const double w = kPi * k;
  if (sine) return (std::cos(w * lo) - std::cos(w * hi)) / w;
  return (std::sin(w * hi) - std::sin(w * lo)) / w;
}

struct AxisTables {
  std::vector<double> integral;  // int over cell of f
  std::vector<double> jump;      // f(right edge) - f(left edge) = int over cell of f'
};

AxisTables axis_tables(int k, bool sine, int n) {
  AxisTables t;
  const double h = 2.0 / n;
  for (int i = 0; i < n; ++i) {
    const double lo = -1.0 + i * h, hi = lo + h;
    t.integral.push_back(int1(k, sine, lo, hi));
    t.jump.push_back(f1(k, sine, hi) - f1(k, sine, lo));
  }
  return t;
}

CellTest discretize(const SpatialMode& m, const Envelope& env, const TorusGrid& grid) {
  CellTest ct;
  ct.envelope = env;
  ct.constant = m.constant();
  const int n = grid.cells_per_axis;
  const auto ax = axis_tables(m.kx, m.sine_x, n);
  ct.phi.resize(grid.cell_count());
  ct.grad.resize(grid.cell_count());
  if (grid.dim == 1) {
    for (int i = 0; i < n; ++i) {
      ct.phi[static_cast<std::size_t>(i)] = ax.integral[static_cast<std::size_t>(i)];
      ct.grad[static_cast<std::size_t>(i)] = {ax.jump[static_cast<std::size_t>(i)], 0.0};
    }
    return ct;
  }
  const auto ay = axis_tables(m.ky, m.sine_y, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const std::size_t c = grid.index(i, j);
      ct.phi[c] = ax.integral[ui] * ay.integral[uj];
      ct.grad[c] = {ax.jump[ui] * ay.integral[uj], ax.integral[ui] * ay.jump[uj]};
    }
  }
  return ct;
}

using detail::kGaussW;
using detail::kGaussX;

/// Samples of a(t) and b(t) at snapshot times, interpolated linearly between
/// them. Returns psi(t_S) a_S - psi(0) a_0 - int (psi' a + psi b) dt over the
/// selected snapshot indices.
double time_functional(const std::vector<double>& t, const std::vector<double>& a,
                       const std::vector<double>& b, const Envelope& env,
                       const std::vector<std::size_t>& idx) {
  const std::size_t first = idx.front(), last = idx.back();
  double r = env.value(t[last]) * a[last] - env.value(t[first]) * a[first];
  for (std::size_t q = 1; q < idx.size(); ++q) {
    const std::size_t i0 = idx[q - 1], i1 = idx[q];
    const double dt = t[i1] - t[i0];
    for (std::size_t g = 0; g < kGaussX.size(); ++g) {
      const double s = kGaussX[g];
      const double tt = t[i0] + s * dt;
      const double av = (1.0 - s) * a[i0] + s * a[i1];
      const double bv = (1.0 - s) * b[i0] + s * b[i1];
      r -= kGaussW[g] * dt * (env.derivative(tt) * av + env.value(tt) * bv);
    }
  }
  return r;
}

std::vector<std::size_t> all_indices(std::size_t last) {
  std::vector<std::size_t> v(last + 1);
  for (std::size_t k = 0; k <= last; ++k) v[k] = k;
  return v;
}

std::vector<std::size_t> every_other(std::size_t last) {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k <= last; k += 2) v.push_back(k);
  if (v.back() != last) v.push_back(last);
  return v;
}

struct Series {
  std::vector<double> t, a, b;
};

ResidualEntry finish(const std::string& id, const Series& s, const Envelope& env, bool constant,
                     int maxk) {
  const std::size_t last = s.t.size() - 1;
  ResidualEntry e;
  e.id = id;
  e.residual = time_functional(s.t, s.a, s.b, env, all_indices(last));
  e.quadrature_estimate =
      last >= 2 ? std::abs(e.residual - time_functional(s.t, s.a, s.b, env, every_other(last)))
                : 0.0;
  e.constant = constant;
  e.max_wavenumber = maxk;
  return e;
}

double spacing(const std::vector<double>& t) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s = std::max(s, t[k] - t[k - 1]);
  return s;
}

std::size_t last_index(const Trajectory& traj, double tau) {
  if (traj.empty()) throw DomainError("empty trajectory");
  return traj.index_at(tau, 1e-9);
}

void check_defects(const Trajectory& traj, const std::vector<DefectField>* defects,
                   std::size_t last) {
  if (defects == nullptr) return;
  if (defects->size() <= last) {
    throw IncompatibleError("need one defect field per snapshot up to tau");
  }
  for (std::size_t k = 0; k <= last; ++k) {
    if (!((*defects)[k].grid() == traj.grid())) {
      throw IncompatibleError("defect partition does not live on the trajectory grid");
    }
  }
}

double dot_sum(const std::vector<double>& v, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * w[k];
  return s;
}

/// a = <rho, phi>, b = <m, grad phi> at each snapshot.
Series continuity_series(const Trajectory& traj, const CellTest& test, std::size_t last) {
  Series s;
  for (std::size_t k = 0; k <= last; ++k) {
    const auto& f = traj[k];
    double b = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) b += dot(f.mom[c], test.grad[c]);
    s.t.push_back(f.time);
    s.a.push_back(dot_sum(f.rho, test.phi));
    s.b.push_back(b);
  }
  return s;
}

/// Row `comp` of the momentum flux at every cell.
std::vector<Vec2> flux_rows(const ConservedField& f, const EosParams& eos, int comp,
                            const DefectField* d) {
  const auto uc = static_cast<std::size_t>(comp);
  std::vector<Vec2> row(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double r = f.rho[c];
    const Vec2& m = f.mom[c];
    Vec2 v{0.0, 0.0};
    if (r > 0.0) v = (m[uc] / r) * m;
    v[uc] += pressure(r, eos);
    if (d != nullptr) {
      const Sym2& rv = d->Rv[c];
      v = v + (comp == 0 ? Vec2{rv.xx, rv.xy} : Vec2{rv.xy, rv.yy});
      v[uc] += d->Rp[c];
    }
    if (f.grid.dim == 1) v[1] = 0.0;
    row[c] = v;
  }
  return row;
}

Series momentum_series(const Trajectory& traj, const CellTest& test, std::size_t last,
                       const EosParams& eos, const std::vector<DefectField>* defects) {
  Series s;
  const auto uc = static_cast<std::size_t>(test.component);
  for (std::size_t k = 0; k <= last; ++k) {
    const auto& f = traj[k];
    const auto row =
        flux_rows(f, eos, test.component, defects ? &(*defects)[k] : nullptr);
    double a = 0.0, b = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
      a += f.mom[c][uc] * test.phi[c];
      b += dot(row[c], test.grad[c]);
    }
    s.t.push_back(f.time);
    s.a.push_back(a);
    s.b.push_back(b);
  }
  return s;
}

}  // namespace

double mode_value(const SpatialMode& m, const Vec2& x, int dim) {
  double v = f1(m.kx, m.sine_x, x[0]);
  if (dim == 2) v *= f1(m.ky, m.sine_y, x[1]);
  return v;
}

Vec2 mode_gradient(const SpatialMode& m, const Vec2& x, int dim) {
  if (dim == 1) return {df1(m.kx, m.sine_x, x[0]), 0.0};
  return {df1(m.kx, m.sine_x, x[0]) * f1(m.ky, m.sine_y, x[1]),
          f1(m.kx, m.sine_x, x[0]) * df1(m.ky, m.sine_y, x[1])};
}

CellTest& CellTest::operator+=(const CellTest& o) {
  if (o.envelope.power != envelope.power || o.component != component ||
      o.phi.size() != phi.size()) {
    throw IncompatibleError("test functions with different envelopes cannot be added cellwise");
  }
  for (std::size_t c = 0; c < phi.size(); ++c) {
    phi[c] += o.phi[c];
    grad[c] = grad[c] + o.grad[c];
  }
  id += "+" + o.id;
  constant = constant && o.constant;
  return *this;
}

CellTest& CellTest::operator*=(double s) {
  for (std::size_t c = 0; c < phi.size(); ++c) {
    phi[c] *= s;
    grad[c] = s * grad[c];
  }
  return *this;
}

TestFunctionBank::TestFunctionBank(int dim, double horizon, int max_mode, int envelopes)
    : dim_(dim), horizon_(horizon), max_mode_(max_mode) {
  if (dim != 1 && dim != 2) throw DomainError("bank dimension must be 1 or 2");
  if (!(horizon > 0.0)) throw DomainError("bank horizon must be positive");
  if (max_mode < 0) throw DomainError("max_mode must be non-negative");
  if (envelopes < 1 || envelopes > 5) throw DomainError("envelope count must lie in 1..5");
  std::vector<std::pair<int, bool>> axis;
  for (int k = 0; k <= max_mode; ++k) {
    axis.push_back({k, false});
    if (k > 0) axis.push_back({k, true});
  }
  if (dim == 1) {
    for (auto [k, s] : axis) modes_.push_back({k, 0, s, false});
  } else {
    for (auto [ky, sy] : axis) {
      for (auto [kx, sx] : axis) modes_.push_back({kx, ky, sx, sy});
    }
  }
  for (int j = 1; j <= envelopes; ++j) envelopes_.push_back({j + 1, horizon});
}

CellTest TestFunctionBank::scalar_test(std::size_t i, const TorusGrid& grid) const {
  if (grid.dim != dim_) throw IncompatibleError("bank and grid dimensions differ");
  if (i >= scalar_count()) throw DomainError("scalar test index out of range");
  CellTest ct = discretize(mode_of(i), envelope_of(i), grid);
  ct.id = mode_of(i).id(dim_) + "@" + envelope_of(i).id();
  return ct;
}

CellTest TestFunctionBank::vector_test(std::size_t i, const TorusGrid& grid) const {
  if (i >= vector_count()) throw DomainError("vector test index out of range");
  const auto d = static_cast<std::size_t>(dim_);
  CellTest ct = scalar_test(i / d, grid);
  ct.component = static_cast<int>(i % d);
  ct.id = "m" + std::to_string(ct.component) + ":" + ct.id;
  return ct;
}

double TestFunctionBank::value(std::size_t i, const Vec2& x, double t) const {
  return mode_value(mode_of(i), x, dim_) * envelope_of(i).value(t);
}

Vec2 TestFunctionBank::gradient(std::size_t i, const Vec2& x, double t) const {
  return envelope_of(i).value(t) * mode_gradient(mode_of(i), x, dim_);
}

double TestFunctionBank::time_derivative(std::size_t i, const Vec2& x, double t) const {
  return mode_value(mode_of(i), x, dim_) * envelope_of(i).derivative(t);
}

std::string TestFunctionBank::describe() const {
  std::ostringstream os;
  os << "trig modes <= " << max_mode_ << " in " << dim_ << "D x envelopes (1-t/" << horizon_
     << ")^p, p = 2.." << envelopes_.size() + 1;
  return os.str();
}

void ResidualReport::add(ResidualEntry e) {
  max_abs = std::max(max_abs, std::abs(e.residual));
  entries.push_back(std::move(e));
}

double continuity_residual(const Trajectory& traj, const CellTest& test, double tau) {
  const std::size_t last = last_index(traj, tau);
  const auto s = continuity_series(traj, test, last);
  return time_functional(s.t, s.a, s.b, test.envelope, all_indices(last));
}

ResidualReport continuity_residual(const Trajectory& traj, const TestFunctionBank& bank,
                                   double tau) {
  const std::size_t last = last_index(traj, tau);
  ResidualReport rep;
  rep.bank = bank.describe();
  rep.tau = tau;
  for (std::size_t i = 0; i < bank.scalar_count(); ++i) {
    const CellTest test = bank.scalar_test(i, traj.grid());
    const auto s = continuity_series(traj, test, last);
    rep.snapshot_spacing = spacing(s.t);
    rep.add(finish(test.id, s, test.envelope, test.constant,
                   bank.modes()[i / bank.envelopes().size()].max_wavenumber()));
  }
  return rep;
}

double momentum_residual(const Trajectory& traj, const CellTest& test, double tau,
                         const EosParams& eos, const std::vector<DefectField>* defects) {
  if (test.component < 0) throw DomainError("momentum residual needs a vector test");
  const std::size_t last = last_index(traj, tau);
  check_defects(traj, defects, last);
  const auto s = momentum_series(traj, test, last, eos, defects);
  return time_functional(s.t, s.a, s.b, test.envelope, all_indices(last));
}

ResidualReport momentum_residual(const Trajectory& traj, const TestFunctionBank& bank, double tau,
                                 const EosParams& eos, const std::vector<DefectField>* defects) {
  const std::size_t last = last_index(traj, tau);
  check_defects(traj, defects, last);
  ResidualReport rep;
  rep.bank = bank.describe();
  rep.tau = tau;
  const auto d = static_cast<std::size_t>(bank.dim());
  for (std::size_t i = 0; i < bank.vector_count(); ++i) {
    const CellTest test = bank.vector_test(i, traj.grid());
    const auto s = momentum_series(traj, test, last, eos, defects);
    rep.snapshot_spacing = spacing(s.t);
    rep.add(finish(test.id, s, test.envelope, test.constant,
                   bank.modes()[i / d / bank.envelopes().size()].max_wavenumber()));
  }
  return rep;
}

ResidualReport viscous_pairing(const Trajectory& traj, const TestFunctionBank& bank, double tau,
                               const ViscosityModel& model, double floor) {
  const std::size_t last = last_index(traj, tau);
  const int dim = traj.grid().dim;
  std::vector<std::vector<Sym2>> stress;
  for (std::size_t k = 0; k <= last; ++k) {
    const auto grad = velocity_gradients(traj[k], floor);
    std::vector<Sym2> s(grad.size());
    for (std::size_t c = 0; c < grad.size(); ++c) s[c] = viscous_stress(grad[c], model, dim);
    stress.push_back(std::move(s));
  }
  ResidualReport rep;
  rep.bank = bank.describe();
  rep.tau = tau;
  const auto d = static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < bank.vector_count(); ++i) {
    const CellTest test = bank.vector_test(i, traj.grid());
    Series s;
    for (std::size_t k = 0; k <= last; ++k) {
      double b = 0.0;
      for (std::size_t c = 0; c < test.grad.size(); ++c) {
        const Sym2& S = stress[k][c];
        const Vec2 row = test.component == 0 ? Vec2{S.xx, S.xy} : Vec2{S.xy, S.yy};
        b += dot(row, test.grad[c]);
      }
      s.t.push_back(traj[k].time);
      s.a.push_back(0.0);
      // time_functional subtracts int psi b, so store -eps b to get +eps int psi <S, grad phi>.
      s.b.push_back(-model.epsilon * b);
    }
    rep.snapshot_spacing = spacing(s.t);
    rep.add(finish(test.id, s, test.envelope, test.constant,
                   bank.modes()[i / d / bank.envelopes().size()].max_wavenumber()));
  }
  return rep;
}

EnergyLedger ledger_from_snapshots(const Trajectory& traj, const EosParams& eos) {
  EnergyLedger l;
  for (const auto& s : traj.snapshots()) l.append(s.time, total_energy(s, eos), 0.0);
  return l;
}

EnergySlackReport energy_inequality_check(const Trajectory& traj, const EnergyLedger& ledger,
                                          const TestFunctionBank& bank, const EosParams& eos,
                                          const std::vector<DefectField>* defects) {
  if (ledger.size() == 0) throw DomainError("energy check needs a non-empty ledger");
  const auto snap_t = traj.times();
  if (defects != nullptr && defects->size() != traj.size()) {
    throw IncompatibleError("need one defect field per snapshot");
  }

  // Total energy on the ledger time grid.
  std::vector<double> defect_e(traj.size(), 0.0);
  if (defects != nullptr) {
    for (std::size_t k = 0; k < traj.size(); ++k) defect_e[k] = (*defects)[k].energy(eos);
  }
  const auto& lt = ledger.times;
  std::vector<double> E(lt.size());
  for (std::size_t l = 0; l < lt.size(); ++l) {
    double de = defect_e.front();
    if (lt[l] >= snap_t.back()) {
      de = defect_e.back();
    } else if (lt[l] > snap_t.front()) {
      const auto it = std::upper_bound(snap_t.begin(), snap_t.end(), lt[l]);
      const auto k = static_cast<std::size_t>(it - snap_t.begin());
      const double s = (lt[l] - snap_t[k - 1]) / (snap_t[k] - snap_t[k - 1]);
      de = (1.0 - s) * defect_e[k - 1] + s * defect_e[k];
    }
    E[l] = ledger.energy[l] + de;
  }

  std::vector<std::size_t> at;  // ledger row of each snapshot
  for (double t : snap_t) {
    std::size_t best = 0;
    for (std::size_t l = 0; l < lt.size(); ++l) {
      if (std::abs(lt[l] - t) < std::abs(lt[best] - t)) best = l;
    }
    if (std::abs(lt[best] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw IncompatibleError("ledger has no row at snapshot time " + std::to_string(t));
    }
    at.push_back(best);
  }

  std::vector<Envelope> envs{Envelope{0, bank.horizon()}};
  for (const auto& e : bank.envelopes()) envs.push_back(e);

  EnergySlackReport rep;
  rep.tolerance = 1e-6 * std::abs(E.front());
  rep.min_slack = kInfinity;
  for (const auto& env : envs) {
    // F[l] = int_0^{t_l} psi' E dt with E linear between ledger rows.
    std::vector<double> F(lt.size(), 0.0);
    for (std::size_t l = 1; l < lt.size(); ++l) {
      const double dt = lt[l] - lt[l - 1];
      double acc = 0.0;
      for (std::size_t g = 0; g < kGaussX.size(); ++g) {
        const double s = kGaussX[g];
        acc += kGaussW[g] * env.derivative(lt[l - 1] + s * dt) * ((1.0 - s) * E[l - 1] + s * E[l]);
      }
      F[l] = F[l - 1] + acc * dt;
    }
    EnvelopeSlack es{env.id(), kInfinity, 0.0, 0.0};
    for (std::size_t i = 0; i < at.size(); ++i) {
      for (std::size_t j = i; j < at.size(); ++j) {
        const std::size_t a = at[i], b = at[j];
        const double slack =
            F[b] - F[a] - env.value(lt[b]) * E[b] + env.value(lt[a]) * E[a];
        if (slack < es.min_slack) es = {env.id(), slack, lt[a], lt[b]};
      }
    }
    rep.min_slack = std::min(rep.min_slack, es.min_slack);
    rep.envelopes.push_back(es);
  }
  rep.pass = rep.min_slack >= -rep.tolerance;
  return rep;
}

ConsistencyTable consistency_sweep(const std::vector<SequenceMember>& members,
                                   const TestFunctionBank& bank, const EosParams& eos) {
  if (members.size() < 3) throw DomainError("consistency sweep needs at least three members");
  std::vector<const SequenceMember*> order;
  for (const auto& m : members) order.push_back(&m);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->epsilon > b->epsilon; });

  ConsistencyTable table;
  const double tau = bank.horizon();
  // values[kind][id] in sweep order.
  std::map<std::string, std::map<std::string, std::vector<double>>> values;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& traj = order[k]->trajectory;
    const double eps = order[k]->epsilon;
    auto push = [&](const std::string& kind, const std::string& id, double v) {
      table.rows.push_back({k, eps, kind, id, v});
      values[kind][id].push_back(v);
    };
    for (const auto& e : continuity_residual(traj, bank, tau).entries) {
      push("E1", e.id, std::abs(e.residual));
    }
    for (const auto& e : momentum_residual(traj, bank, tau, eos).entries) {
      push("E2", e.id, std::abs(e.residual));
    }
    const std::size_t last = traj.index_at(tau, 1e-9);
    Series s;
    for (std::size_t q = 0; q <= last; ++q) {
      s.t.push_back(traj[q].time);
      s.a.push_back(total_energy(traj[q], eos));
      s.b.push_back(0.0);
    }
    if (k == 0) table.initial_energy = s.a.front();
    for (const auto& env : bank.envelopes()) {
      // time_functional gives psi(tau) E(tau) - E(0) - int psi' E.
      const double r = time_functional(s.t, s.a, s.b, env, all_indices(last)) -
                       env.value(s.t.back()) * s.a.back();
      push("E3", env.id(), std::abs(r));
    }
  }

  const double floor = 1e-12 * std::max(1.0, table.initial_energy);
  auto monotone = [&](const std::string& kind) {
    bool ok = true;
    for (const auto& [id, v] : values[kind]) {
      for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[k - 1] * (1.0 + 1e-9) + floor) {
          ok = false;
          table.violations.push_back(kind + " " + id + " rises between members " +
                                     std::to_string(k - 1) + " and " + std::to_string(k));
        }
      }
    }
    return ok;
  };
  table.e1_monotone = monotone("E1");
  table.e2_monotone = monotone("E2");
  table.e3_monotone = monotone("E3");

  // sup |psi| = psi(0) = 1 for every bank envelope.
  for (const auto& [id, v] : values["E3"]) table.c_bound = std::max(table.c_bound, v.front());
  table.c_bounds_all = table.c_bound <= table.initial_energy;
  for (const auto& [id, v] : values["E3"]) {
    for (double x : v) {
      if (x > table.c_bound * (1.0 + 1e-12) + floor) table.c_bounds_all = false;
    }
  }
  if (!table.c_bounds_all) table.violations.push_back("E3 exceeds the shared bound c");
  return table;
}

}  // namespace dlab
