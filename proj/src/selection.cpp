#include "dlab/selection.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

constexpr double kTimeTolerance = 1e-12;
constexpr double kPrecedenceTolerance = 1e-10;

void require_same_discretization(const DissipativeRecord& a, const DissipativeRecord& b) {
  if (a.trajectory.empty() || b.trajectory.empty()) throw IncompatibleError("empty record");
  if (!(a.grid() == b.grid())) throw IncompatibleError("records live on different grids");
  if (a.trajectory.size() != b.trajectory.size() || a.defects.size() != b.defects.size() ||
      a.defects.size() != a.trajectory.size()) {
    throw IncompatibleError("records have different snapshot counts");
  }
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const double ta = a.trajectory[k].time, tb = b.trajectory[k].time;
    if (std::abs(ta - tb) > kTimeTolerance * std::max(1.0, std::abs(ta))) {
      throw IncompatibleError("records have different snapshot times");
    }
    if (!(a.defects[k].partition == b.defects[k].partition)) {
      throw IncompatibleError("records use different defect partitions");
    }
  }
}

double initial_total_energy(const DissipativeRecord& r, const EosParams& eos) {
  return total_energy(r.trajectory.front(), eos) + r.defect_energy(0, eos);
}

std::vector<double> cell_totals(const DissipativeRecord& record, std::size_t k,
                                const EosParams& eos) {
  const auto& f = record.trajectory[k];
  const auto& d = record.defects.at(k);
  if (d.size() != f.size()) throw IncompatibleError("defects do not match the record grid");
  std::vector<double> e(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) {
    e[c] = total_energy_density(f.rho[c], f.mom[c], eos) + d.energy_density(c, eos);
  }
  return e;
}

std::vector<double> block_average(const std::vector<double>& v, const TorusGrid& grid, int block) {
  if (block == 1) return v;
  const BlockPartition part(grid, block);
  std::vector<double> out(part.output_count(), 0.0);
  for (std::size_t o = 0; o < out.size(); ++o) {
    part.for_each_member(o, [&](std::size_t c, double w) { out[o] += w * v[c]; });
  }
  return out;
}

std::vector<double> merged_times(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> t;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(t));
  std::vector<double> out;
  for (double x : t) {
    if (out.empty() || x - out.back() > kTimeTolerance * std::max(1.0, std::abs(x))) out.push_back(x);
  }
  return out;
}

}  // namespace

const char* to_string(Precedence p) {
  switch (p) {
    case Precedence::Precedes: return "precedes";
    case Precedence::Reversed: return "reversed";
    case Precedence::Incomparable: return "incomparable";
  }
  return "?";
}

std::vector<double> energy_density_total(const DissipativeRecord& record, double t,
                                         const EosParams& eos, int block) {
  const std::size_t k = record.trajectory.index_at(t);
  return block_average(cell_totals(record, k, eos), record.grid(), block);
}

Precedence precedes(const DissipativeRecord& a, const DissipativeRecord& b, const EosParams& eos,
                    int block) {
  require_same_discretization(a, b);
  const double tol = kPrecedenceTolerance *
                     std::max(initial_total_energy(a, eos), initial_total_energy(b, eos));
  bool a_below = true, b_below = true;
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const auto ea = block_average(cell_totals(a, k, eos), a.grid(), block);
    const auto eb = block_average(cell_totals(b, k, eos), b.grid(), block);
    for (std::size_t c = 0; c < ea.size(); ++c) {
      if (!(ea[c] <= eb[c] + tol)) a_below = false;
      if (!(eb[c] <= ea[c] + tol)) b_below = false;
    }
    if (!a_below && !b_below) return Precedence::Incomparable;
  }
  if (a_below) return Precedence::Precedes;
  return b_below ? Precedence::Reversed : Precedence::Incomparable;
}

void Ensemble::validate(const EosParams& eos) const {
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto audit = audit_record(members[i], eos);
    if (!audit.ok()) {
      std::string why = "ensemble member " + std::to_string(i) + " fails its audit";
      if (!audit.problems.empty()) why += ": " + audit.problems.front();
      throw DomainError(why);
    }
    if (i == 0) continue;
    require_same_discretization(members[0], members[i]);
    const auto& f0 = members[0].trajectory.front();
    const auto& fi = members[i].trajectory.front();
    for (std::size_t c = 0; c < f0.size(); ++c) {
      const double dr = std::abs(f0.rho[c] - fi.rho[c]);
      const double dm = std::sqrt(norm2(f0.mom[c] - fi.mom[c]));
      const double scale = std::max({1.0, std::abs(f0.rho[c]), std::sqrt(norm2(f0.mom[c]))});
      if (dr > kInitialDataTolerance * scale || dm > kInitialDataTolerance * scale) {
        throw IncompatibleError("ensemble member " + std::to_string(i) +
                                " starts from different initial data");
      }
    }
  }
}

double energy_functional(const DissipativeRecord& record, const EosParams& eos) {
  const double vol = record.grid().cell_volume();
  std::vector<double> per_time;
  for (std::size_t k = 0; k < record.trajectory.size(); ++k) {
    double s = 0.0;
    for (double e : cell_totals(record, k, eos)) s += e;
    per_time.push_back(s * vol);
  }
  const auto t = record.times();
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += 0.5 * (t[k] - t[k - 1]) * (per_time[k] + per_time[k - 1]);
  }
  return total;
}

Selection select_admissible(const Ensemble& ensemble, const EosParams& eos) {
  if (ensemble.members.empty()) throw DomainError("cannot select from an empty ensemble");
  ensemble.validate(eos);
  Selection sel;
  for (const auto& m : ensemble.members) sel.functionals.push_back(energy_functional(m, eos));
  for (std::size_t i = 1; i < sel.functionals.size(); ++i) {
    if (sel.functionals[i] < sel.functionals[sel.winner]) sel.winner = i;
  }
  const auto& w = ensemble.members[sel.winner];
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    if (i == sel.winner) continue;
    CertificateEntry e{i, precedes(w, ensemble.members[i], eos), sel.functionals[i]};
    if (e.verdict == Precedence::Reversed) sel.minimal = false;
    sel.certificate.push_back(e);
  }
  return sel;
}

DissipativeRecord convex_combine(const DissipativeRecord& a, const DissipativeRecord& b,
                                 double lambda, const EosParams& eos) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("combination weight must lie in [0, 1], got " + std::to_string(lambda));
  }
  require_same_discretization(a, b);
  if (lambda == 1.0) return a;
  if (lambda == 0.0) return b;

  DissipativeRecord out;
  out.provenance = "convex(" + std::to_string(lambda) + "; " + a.provenance + " | " + b.provenance + ")";
  const TorusGrid& grid = a.grid();
  std::vector<double> gap_energy;
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const auto& fa = a.trajectory[k];
    const auto& fb = b.trajectory[k];
    const auto& da = a.defects[k];
    const auto& db = b.defects[k];
    ConservedField f(grid, fa.time);
    DefectField d = da;
    double gap = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
      const auto mix = mixture_defect({{fa.rho[c], fa.mom[c], lambda}, {fb.rho[c], fb.mom[c], 1.0 - lambda}}, eos);
      f.rho[c] = mix.rho;
      f.mom[c] = mix.mom;
      d.Rv[c] = lambda * da.Rv[c] + (1.0 - lambda) * db.Rv[c] + mix.Rv;
      d.Rp[c] = lambda * da.Rp[c] + (1.0 - lambda) * db.Rp[c] + mix.Rp;
      gap += 0.5 * mix.Rv.trace() + mix.Rp / (eos.gamma - 1.0);
    }
    gap_energy.push_back(gap * grid.cell_volume());
    out.trajectory.push_back(std::move(f));
    out.defects.push_back(std::move(d));
  }

  // The ledger keeps total energy (fields plus defects) affine in lambda:
  // parents' ledger energies minus the convexity gap moved into the defects.
  const auto snap = out.trajectory.times();
  for (double t : merged_times(a.ledger.times, b.ledger.times)) {
    const double e = lambda * detail::interpolate(a.ledger.times, a.ledger.energy, t) +
                     (1.0 - lambda) * detail::interpolate(b.ledger.times, b.ledger.energy, t) -
                     detail::interpolate(snap, gap_energy, t);
    const double diss = lambda * a.ledger.dissipation_at(t) + (1.0 - lambda) * b.ledger.dissipation_at(t);
    out.ledger.append(t, e, diss);
  }
  return out;
}

}  // namespace dlab
