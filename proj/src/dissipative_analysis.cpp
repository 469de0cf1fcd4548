#include "dlab/dissipative_analysis.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dlab/weak_form.hpp"

namespace dlab {

double DissipativeRecord::defect_energy(std::size_t k, const EosParams& eos) const {
  return defects.at(k).energy(eos);
}

double DissipativeRecord::defect_mass(const EosParams& eos) const {
  double m = 0.0;
  for (std::size_t k = 0; k < defects.size(); ++k) m = std::max(m, defect_energy(k, eos));
  return m;
}

using detail::interpolate;

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& v, std::size_t last) {
  double s = 0.0;
  for (std::size_t k = 1; k <= last; ++k) s += 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
  return s;
}

}  // namespace

DissipativeRecord make_record(const RunResult& run, const EosParams& eos, int block,
                              AveragingMode mode, const std::string& provenance) {
  DissipativeRecord rec;
  rec.provenance = provenance;
  const TorusGrid& g = run.trajectory.grid();
  if (block == 1 && mode == AveragingMode::Block) {
    rec.trajectory = run.trajectory;
    rec.ledger = run.ledger;
    for (const auto& s : run.trajectory.snapshots()) rec.defects.push_back(DefectField::zero(g, s.time));
    return rec;
  }
  const BlockPartition part(g, block, mode);
  for (const auto& s : run.trajectory.snapshots()) {
    rec.trajectory.push_back(coarse_grain(s, part));
    rec.defects.push_back(defect_field(s, part, eos));
  }
  const auto t = run.trajectory.times();
  std::vector<double> de;
  for (const auto& d : rec.defects) de.push_back(d.energy(eos));
  for (std::size_t l = 0; l < run.ledger.size(); ++l) {
    const double tl = run.ledger.times[l];
    rec.ledger.append(tl, run.ledger.energy[l] - interpolate(t, de, tl), run.ledger.dissipation[l]);
  }
  return rec;
}

RecordAudit audit_record(const DissipativeRecord& record, const EosParams& eos) {
  RecordAudit a;
  const auto& traj = record.trajectory;
  a.shapes_ok = !traj.empty() && record.defects.size() == traj.size();
  if (a.shapes_ok) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (!(record.defects[k].grid() == traj.grid()) ||
          std::abs(record.defects[k].time - traj[k].time) > 1e-12) {
        a.shapes_ok = false;
      }
    }
  }
  if (!a.shapes_ok) {
    a.problems.push_back("defects do not match the snapshots");
    return a;
  }
  a.defects_ok = true;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (!record.defects[k].satisfies_invariants()) {
      a.defects_ok = false;
      a.problems.push_back("defect positivity fails at t = " + std::to_string(traj[k].time));
    }
    if (!traj[k].admissible()) {
      a.defects_ok = false;
      a.problems.push_back("inadmissible state at t = " + std::to_string(traj[k].time));
    }
  }
  if (traj.size() < 2) {
    a.energy_ok = true;
    return a;
  }
  const TestFunctionBank bank(traj.grid().dim, traj.back().time, 0, 2);
  const auto rep = energy_inequality_check(traj, record.ledger, bank, eos, &record.defects);
  a.min_energy_slack = rep.min_slack;
  a.energy_ok = rep.pass;
  if (!rep.pass) a.problems.push_back("energy inequality violated");
  return a;
}

double one_sided_lipschitz_d(const std::vector<Vec2>& velocity, const TorusGrid& grid,
                             Boundary boundary) {
  if (velocity.size() != grid.cell_count()) throw IncompatibleError("velocity size mismatch");
  const int n = grid.cells_per_axis;
  const double h = grid.spacing();
  double d = -kInfinity;
  for (std::size_t c = 0; c < velocity.size(); ++c) {
    const auto ij = grid.coords(c);
    Mat2 g{};
    for (int b = 0; b < grid.dim; ++b) {
      int up = 1, down = -1;
      if (boundary == Boundary::Open) {
        const int pos = ij[static_cast<std::size_t>(b)];
        if (pos == n - 1) up = 0;
        if (pos == 0) down = 0;
      }
      const Vec2 du = velocity[grid.shifted(c, b, up)] - velocity[grid.shifted(c, b, down)];
      const double width = (up - down) * h;
      for (int a = 0; a < grid.dim; ++a) {
        g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            du[static_cast<std::size_t>(a)] / width;
      }
    }
    d = std::max(d, -Sym2::sym_part(g).min_eigenvalue(grid.dim));
  }
  return d;
}

double one_sided_lipschitz_d(const ConservedField& field, double floor) {
  return one_sided_lipschitz_d(velocity_from_conservative(field, floor), field.grid);
}

GronwallReport gronwall_defect_bound(const DissipativeRecord& record, const EosParams& eos,
                                     double t0, double t1, double floor) {
  const auto& traj = record.trajectory;
  if (record.defects.size() != traj.size()) throw IncompatibleError("record defects incomplete");
  if (!(t1 >= t0)) throw DomainError("Gronwall interval must satisfy t0 <= t1");
  GronwallReport rep;
  rep.constant = std::max(2.0, traj.grid().dim * (eos.gamma - 1.0));
  const double e0 = total_energy(traj.front(), eos) + record.defect_energy(0, eos);
  rep.tolerance = 1e-6 * e0;
  std::vector<double> rate;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj[k].time;
    if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
    const auto& f = traj[k];
    const auto below = std::count_if(f.rho.begin(), f.rho.end(), [&](double r) { return r < floor; });
    rep.vacuum_fraction =
        std::max(rep.vacuum_fraction, static_cast<double>(below) / static_cast<double>(f.size()));
    rep.times.push_back(t);
    rep.defect.push_back(record.defect_energy(k, eos));
    rep.d_osl.push_back(one_sided_lipschitz_d(f, floor));
    rate.push_back(std::max(0.0, rep.d_osl.back()));
  }
  if (rep.times.empty()) throw DomainError("no snapshots inside the Gronwall interval");
  rep.pass = true;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    rep.bound.push_back(rep.defect.front() * std::exp(rep.constant * trapezoid(rep.times, rate, k)));
    if (rep.defect[k] > rep.bound[k] + rep.tolerance) rep.pass = false;
  }
  if (rep.vacuum_fraction > 0.01) {
    rep.warning = "velocity unreliable: more than 1% of cells below the density floor";
  }
  return rep;
}

const char* to_string(Verdict v) { return v == Verdict::Classical ? "CLASSICAL" : "DISSIPATIVE"; }

CompatibilityReport compatibility_check(const DissipativeRecord& record, const EosParams& eos,
                                        const CompatibilityOptions& options) {
  const auto& traj = record.trajectory;
  const TorusGrid& g = traj.grid();
  CompatibilityReport rep;
  rep.min_density = kInfinity;
  rep.initial_energy = total_energy(traj.front(), eos) + record.defect_energy(0, eos);
  std::vector<double> rate;
  auto jump_ratio = [&](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double range = *hi - *lo;
    if (range <= 1e-14 * std::max(1.0, std::abs(*hi))) return 0.0;
    double jump = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      for (int a = 0; a < g.dim; ++a) jump = std::max(jump, std::abs(v[g.shifted(c, a, 1)] - v[c]));
    }
    return jump / range;
  };
  for (const auto& f : traj.snapshots()) {
    rep.min_density = std::min(rep.min_density, f.min_density());
    rep.max_jump_ratio = std::max(rep.max_jump_ratio, jump_ratio(f.rho));
    for (int a = 0; a < g.dim; ++a) {
      std::vector<double> m;
      for (const auto& v : f.mom) m.push_back(v[static_cast<std::size_t>(a)]);
      rep.max_jump_ratio = std::max(rep.max_jump_ratio, jump_ratio(m));
    }
    rate.push_back(std::max(0.0, one_sided_lipschitz_d(f)));
  }
  const auto t = traj.times();
  rep.d_integral = trapezoid(t, rate, t.size() - 1);
  rep.defect_mass = record.defect_mass(eos);

  std::ostringstream os;
  if (rep.min_density < options.density_floor) {
    os << "density bounded below: min " << rep.min_density << " < " << options.density_floor;
    rep.violated.push_back(os.str());
    os.str("");
  }
  if (rep.max_jump_ratio > options.jump_ratio) {
    os << "bounded gradients: neighbor jump ratio " << rep.max_jump_ratio << " > "
       << options.jump_ratio;
    rep.violated.push_back(os.str());
    os.str("");
  }
  if (!std::isfinite(rep.d_integral)) rep.violated.push_back("integrable one-sided Lipschitz rate");
  if (rep.defect_mass > options.defect_tolerance * rep.initial_energy) {
    os << "vanishing defects: defect mass " << rep.defect_mass << " > "
       << options.defect_tolerance * rep.initial_energy;
    rep.violated.push_back(os.str());
  }
  rep.verdict = rep.violated.empty() ? Verdict::Classical : Verdict::Dissipative;
  return rep;
}

namespace {

void check_besov(double alpha, double q) {
  if (!(alpha > 0.0) || alpha > 1.0) throw DomainError("Besov alpha must lie in (0, 1]");
  if (!(q >= 1.0)) throw DomainError("Besov q must be at least 1");
}

/// Accumulates |x|^q (or max |x| for q = infinity).
struct LqSum {
  double q;
  double acc = 0.0;
  void add(double x, double w) {
    if (std::isinf(q)) {
      acc = std::max(acc, std::abs(x));
    } else {
      acc += w * std::pow(std::abs(x), q);
    }
  }
  double norm() const { return std::isinf(q) ? acc : std::pow(acc, 1.0 / q); }
};

}  // namespace

BesovReport besov_seminorm(const std::vector<double>& values, const TorusGrid& grid, double alpha,
                           double q) {
  check_besov(alpha, q);
  if (values.size() != grid.cell_count()) throw IncompatibleError("value count mismatch");
  return besov_seminorm_spacetime({values}, 1.0, grid, alpha, q);
}

BesovReport besov_seminorm_spacetime(const std::vector<std::vector<double>>& samples, double dt,
                                     const TorusGrid& grid, double alpha, double q) {
  check_besov(alpha, q);
  if (samples.empty()) throw DomainError("no samples");
  for (const auto& s : samples) {
    if (s.size() != grid.cell_count()) throw IncompatibleError("value count mismatch");
  }
  const double vol = grid.cell_volume() * (samples.size() > 1 ? dt : 1.0);
  BesovReport rep;
  LqSum base{q};
  for (const auto& s : samples) {
    for (double v : s) base.add(v, vol);
  }
  rep.lq_norm = base.norm();

  auto consider = [&](double norm, double size, int axis) {
    const double ratio = norm / std::pow(size, alpha);
    if (ratio > rep.seminorm || rep.best_axis < 0) {
      rep.seminorm = ratio;
      rep.best_axis = axis;
      rep.best_shift = size;
    }
  };
  const int n = grid.cells_per_axis;
  for (int a = 0; a < grid.dim; ++a) {
    for (int s = 1; s <= n / 2; ++s) {
      LqSum diff{q};
      for (const auto& v : samples) {
        for (std::size_t c = 0; c < v.size(); ++c) diff.add(v[grid.shifted(c, a, s)] - v[c], vol);
      }
      consider(diff.norm(), s * grid.spacing(), a);
    }
  }
  const std::size_t steps = samples.size();
  for (std::size_t s = 1; s <= steps / 2 && steps > 1; ++s) {
    LqSum diff{q};
    for (std::size_t k = 0; k + s < steps; ++k) {
      for (std::size_t c = 0; c < samples[k].size(); ++c) diff.add(samples[k + s][c] - samples[k][c], vol);
    }
    consider(diff.norm(), static_cast<double>(s) * dt, 2);
  }
  rep.value = rep.lq_norm + rep.seminorm;
  return rep;
}

double relative_energy(const ConservedField& field, const std::vector<double>& r,
                       const std::vector<Vec2>& U, const EosParams& eos, double r_min) {
  if (r.size() != field.size() || U.size() != field.size()) {
    throw IncompatibleError("reference size mismatch");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    if (!(r[c] >= r_min)) {
      throw DomainError("reference density " + std::to_string(r[c]) + " below r_min");
    }
    const double rho = field.rho[c];
    const Vec2& m = field.mom[c];
    double kin = 0.0;
    if (rho > 0.0) {
      kin = 0.5 * rho * norm2((1.0 / rho) * m - U[c]);
    } else if (m[0] != 0.0 || m[1] != 0.0) {
      kin = kInfinity;
    }
    const double breg = pressure_potential(rho, eos) -
                        pressure_potential_derivative(r[c], eos) * (rho - r[c]) -
                        pressure_potential(r[c], eos);
    s += kin + breg;
  }
  return s * field.grid.cell_volume();
}

double relative_energy(const ConservedField& field, const ConservedField& reference,
                       const EosParams& eos, double r_min) {
  if (!(field.grid == reference.grid)) throw IncompatibleError("grids differ");
  std::vector<Vec2> U(reference.size());
  for (std::size_t c = 0; c < U.size(); ++c) {
    if (!(reference.rho[c] >= r_min)) throw DomainError("reference density below r_min");
    U[c] = (1.0 / reference.rho[c]) * reference.mom[c];
  }
  return relative_energy(field, reference.rho, U, eos, r_min);
}

GapCurve weak_strong_gap(const DissipativeRecord& record, const Trajectory& reference,
                         const EosParams& eos, const GapOptions& options) {
  const auto& traj = record.trajectory;
  if (!(traj.grid() == reference.grid())) throw IncompatibleError("record and reference grids differ");
  GapCurve curve;
  const auto& a = traj.front();
  const auto& b = reference.front();
  for (std::size_t c = 0; c < a.size(); ++c) {
    curve.initial_mismatch = std::max({curve.initial_mismatch, std::abs(a.rho[c] - b.rho[c]),
                                       std::abs(a.mom[c][0] - b.mom[c][0]),
                                       std::abs(a.mom[c][1] - b.mom[c][1])});
  }
  if (options.require_initial_match && curve.initial_mismatch > options.initial_tolerance) {
    throw IncompatibleError("initial data differ by " + std::to_string(curve.initial_mismatch));
  }
  std::vector<double> ref_t, ref_rate;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj[k].time;
    std::size_t j = 0;
    try {
      j = reference.index_at(t, 1e-9);
    } catch (const DomainError&) {
      continue;
    }
    curve.times.push_back(t);
    curve.relative.push_back(relative_energy(traj[k], reference[j], eos));
    curve.defect.push_back(record.defect_energy(k, eos));
    curve.gap.push_back(curve.relative.back() + curve.defect.back());
    ref_t.push_back(t);
    ref_rate.push_back(std::max(0.0, one_sided_lipschitz_d(reference[j])));
    const double q = 4.0 * eos.gamma / (eos.gamma - 1.0);
    curve.reference_besov = std::max(
        curve.reference_besov, besov_seminorm(reference[j].rho, reference.grid(), 0.75, q).value);
  }
  if (curve.times.empty()) throw IncompatibleError("record and reference share no snapshot time");
  curve.reference_d_integral = trapezoid(ref_t, ref_rate, ref_t.size() - 1);

  const double base = curve.gap.front() + options.consistency;
  curve.lambda = -kInfinity;
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    if (curve.times[k] <= 0.0 || curve.gap[k] <= 0.0) continue;
    const double l = base > 0.0 ? std::log(curve.gap[k] / base) / curve.times[k] : kInfinity;
    curve.lambda = std::max(curve.lambda, l);
  }
  return curve;
}

}  // namespace dlab
