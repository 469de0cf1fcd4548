#include "dlab/defect_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dlab {

BlockPartition::BlockPartition(const TorusGrid& g, int h, AveragingMode m)
    : grid(g), block(h), mode(m) {
  if (block < 1) throw IncompatibleError("coarse factor must be at least 1");
  const int n = grid.cells_per_axis;
  if (mode == AveragingMode::Block && n % block != 0) {
    throw IncompatibleError("coarse factor " + std::to_string(block) +
                            " does not divide cells per axis " + std::to_string(n));
  }
  if (mode == AveragingMode::Window) {
    if (block > n) throw IncompatibleError("filter width exceeds the grid");
    // Odd H: H full taps. Even H: H - 1 full taps and two half taps, so the
    // filter still covers exactly H cell widths.
    const int half = block / 2;
    for (int j = -half; j <= half; ++j) {
      const bool edge = block % 2 == 0 && std::abs(j) == half;
      taps_.push_back({j, (edge ? 0.5 : 1.0) / block});
    }
  }
}

BlockPartition BlockPartition::default_for(const TorusGrid& grid) {
  const int n = grid.cells_per_axis;
  const int h = n % 16 == 0 ? n / 16 : 1;
  return BlockPartition(grid, h);
}

TorusGrid BlockPartition::output_grid() const {
  if (mode == AveragingMode::Window) return grid;
  return TorusGrid(grid.dim, grid.cells_per_axis / block);
}

MixtureDefect mixture_defect(const std::vector<WeightedState>& states, const EosParams& eos) {
  MixtureDefect out;
  double pbar = 0.0;
  for (const auto& s : states) {
    if (s.rho <= 0.0 && (s.mom[0] != 0.0 || s.mom[1] != 0.0)) {
      throw InadmissibleBlockError("vacuum cell carries momentum");
    }
    out.rho += s.weight * s.rho;
    out.mom = out.mom + s.weight * s.mom;
    pbar += s.weight * pressure(s.rho, eos);
  }
  if (out.rho <= 0.0) {
    if (out.mom[0] != 0.0 || out.mom[1] != 0.0) {
      throw InadmissibleBlockError("vacuum block carries momentum");
    }
    return out;
  }
  const Vec2 ubar = (1.0 / out.rho) * out.mom;
  for (const auto& s : states) {
    if (s.rho <= 0.0) continue;
    const Vec2 du = (1.0 / s.rho) * s.mom - ubar;
    out.Rv += (s.weight * s.rho) * Sym2::outer(du, du);
  }
  out.Rp = pbar - pressure(out.rho, eos);
  return out;
}

namespace {

std::vector<WeightedState> gather(const ConservedField& field, const BlockPartition& partition,
                                  std::size_t out) {
  std::vector<WeightedState> states;
  partition.for_each_member(out, [&](std::size_t k, double w) {
    states.push_back({field.rho[k], field.mom[k], w});
  });
  return states;
}

void require_match(const ConservedField& field, const BlockPartition& partition) {
  if (!(field.grid == partition.grid)) {
    throw IncompatibleError("partition was built for a different grid");
  }
}

}  // namespace

DefectField DefectField::zero(const TorusGrid& grid, double time) {
  DefectField d;
  d.partition = BlockPartition(grid, 1);
  d.Rv.assign(grid.cell_count(), Sym2{});
  d.Rp.assign(grid.cell_count(), 0.0);
  d.time = time;
  return d;
}

double DefectField::energy_density(std::size_t k, const EosParams& eos) const {
  return 0.5 * Rv[k].trace() + Rp[k] / (eos.gamma - 1.0);
}

double DefectField::energy(const EosParams& eos) const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += energy_density(k, eos);
  return s * grid().cell_volume();
}

double DefectField::min_rv_eigenvalue() const {
  const int dim = partition.grid.dim;
  double m = kInfinity;
  for (const auto& r : Rv) m = std::min(m, r.min_eigenvalue(dim));
  return m;
}

double DefectField::min_rp() const {
  return Rp.empty() ? 0.0 : *std::min_element(Rp.begin(), Rp.end());
}

bool DefectField::satisfies_invariants(double tol_rel) const {
  if (Rv.size() != Rp.size() || Rp.size() != grid().cell_count()) return false;
  double scale = 1.0;
  for (std::size_t k = 0; k < size(); ++k) {
    if (!std::isfinite(Rp[k]) || !std::isfinite(Rv[k].trace())) return false;
    scale = std::max({scale, std::abs(Rv[k].xx), std::abs(Rv[k].xy), std::abs(Rv[k].yy),
                      std::abs(Rp[k])});
  }
  const double tol = tol_rel * scale;
  return min_rp() >= -tol && min_rv_eigenvalue() >= -tol;
}

ConservedField coarse_grain(const ConservedField& field, const BlockPartition& partition) {
  require_match(field, partition);
  ConservedField out(partition.output_grid(), field.time);
  for (std::size_t c = 0; c < out.size(); ++c) {
    partition.for_each_member(c, [&](std::size_t k, double w) {
      out.rho[c] += w * field.rho[k];
      out.mom[c] = out.mom[c] + w * field.mom[k];
    });
  }
  return out;
}

std::vector<double> pressure_defect(const ConservedField& field, const BlockPartition& partition,
                                    const EosParams& eos) {
  require_match(field, partition);
  std::vector<double> out(partition.output_count(), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    double rbar = 0.0, pbar = 0.0;
    partition.for_each_member(c, [&](std::size_t k, double w) {
      rbar += w * field.rho[k];
      pbar += w * pressure(field.rho[k], eos);
    });
    out[c] = pbar - pressure(rbar, eos);
  }
  return out;
}

std::vector<Sym2> reynolds_defect(const ConservedField& field, const BlockPartition& partition) {
  require_match(field, partition);
  const EosParams unused;
  std::vector<Sym2> out(partition.output_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = mixture_defect(gather(field, partition, c), unused).Rv;
  }
  return out;
}

DefectField defect_field(const ConservedField& field, const BlockPartition& partition,
                         const EosParams& eos) {
  require_match(field, partition);
  DefectField d;
  d.partition = partition;
  d.time = field.time;
  const std::size_t n = partition.output_count();
  d.Rv.resize(n);
  d.Rp.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto m = mixture_defect(gather(field, partition, c), eos);
    d.Rv[c] = m.Rv;
    d.Rp[c] = m.Rp;
  }
  return d;
}

std::vector<DefectField> defect_history(const Trajectory& traj, const BlockPartition& partition,
                                        const EosParams& eos) {
  std::vector<DefectField> out;
  out.reserve(traj.size());
  for (const auto& s : traj.snapshots()) out.push_back(defect_field(s, partition, eos));
  return out;
}

BookkeepingReport energy_bookkeeping(const ConservedField& field, const BlockPartition& partition,
                                     const EosParams& eos) {
  require_match(field, partition);
  BookkeepingReport rep;
  const std::size_t n = partition.output_count();
  rep.residual.resize(n);
  double scale = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const auto states = gather(field, partition, c);
    double ebar = 0.0;
    for (const auto& s : states) ebar += s.weight * total_energy_density(s.rho, s.mom, eos);
    const auto m = mixture_defect(states, eos);
    const double split = total_energy_density(m.rho, m.mom, eos) + 0.5 * m.Rv.trace() +
                         m.Rp / (eos.gamma - 1.0);
    rep.residual[c] = ebar - split;
    rep.max_abs = std::max(rep.max_abs, std::abs(rep.residual[c]));
    scale = std::max(scale, std::abs(ebar));
  }
  rep.max_relative = scale > 0.0 ? rep.max_abs / scale : rep.max_abs;
  return rep;
}

SequenceDefect sequence_defect(const std::vector<SequenceMember>& members,
                               const BlockPartition& partition, const EosParams& eos, double t) {
  if (members.empty()) throw DomainError("sequence_defect needs at least one member");
  if (partition.mode != AveragingMode::Block) {
    throw IncompatibleError("sequence defects need a block partition");
  }
  const TorusGrid coarse = partition.output_grid();
  std::vector<const SequenceMember*> order;
  for (const auto& m : members) order.push_back(&m);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->epsilon > b->epsilon; });

  SequenceDefect out;
  std::vector<DefectField> fields;
  for (const auto* m : order) {
    const TorusGrid& g = m->trajectory.grid();
    if (g.dim != coarse.dim || g.cells_per_axis % coarse.cells_per_axis != 0) {
      throw IncompatibleError("member grid does not refine the coarse grid");
    }
    const BlockPartition p(g, g.cells_per_axis / coarse.cells_per_axis);
    const auto& snap = m->trajectory[m->trajectory.index_at(t)];
    fields.push_back(defect_field(snap, p, eos));
    out.epsilons.push_back(m->epsilon);
    out.defect_energy.push_back(fields.back().energy(eos));
  }
  const double vol = coarse.cell_volume();
  for (std::size_t k = 1; k < fields.size(); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < coarse.cell_count(); ++c) {
      const Sym2 d = fields[k].Rv[c] - fields[k - 1].Rv[c];
      s += std::abs(d.xx) + 2.0 * std::abs(d.xy) + std::abs(d.yy) +
           std::abs(fields[k].Rp[c] - fields[k - 1].Rp[c]);
    }
    out.cauchy.push_back(s * vol);
  }
  out.cauchy_decreasing = std::is_sorted(out.cauchy.rbegin(), out.cauchy.rend());
  out.limit = fields.back();
  return out;
}

}  // namespace dlab
