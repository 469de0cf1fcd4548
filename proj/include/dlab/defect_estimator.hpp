#pragma once

#include <string>
#include <vector>

#include "dlab/core_state.hpp"

namespace dlab {

/// How fine cells are averaged into defect cells.
///
/// Block: non-overlapping H^dim blocks, output lives on the coarse grid N/H.
/// Window: a centred box filter of width H*h evaluated at every fine cell, so
/// output lives on the fine grid. Filtering commutes with pairing against test
/// functions, which the block average does not.
enum class AveragingMode { Block, Window };

struct BlockPartition {
  TorusGrid grid;
  int block = 1;
  AveragingMode mode = AveragingMode::Block;

  BlockPartition() = default;
  /// Throws IncompatibleError if H < 1, or (Block) H does not divide N, or
  /// (Window) H > N.
  BlockPartition(const TorusGrid& grid, int block, AveragingMode mode = AveragingMode::Block);

  /// H = N / 16 when that divides N, else 1.
  static BlockPartition default_for(const TorusGrid& grid);

  /// Grid on which averaged quantities live.
  TorusGrid output_grid() const;
  std::size_t output_count() const { return output_grid().cell_count(); }

  /// Calls fn(fine_index, weight) for every fine cell feeding output cell `out`.
  /// Weights are non-negative and sum to one.
  template <class Fn>
  void for_each_member(std::size_t out, Fn&& fn) const;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

 private:
  struct Tap {
    int offset;
    double weight;

    friend bool operator==(const Tap&, const Tap&) = default;
  };
  std::vector<Tap> taps_;
};

/// Per-output-cell turbulent defects: PSD matrix Rv and scalar Rp >= 0.
struct DefectField {
  BlockPartition partition;
  std::vector<Sym2> Rv;
  std::vector<double> Rp;
  double time = 0.0;

  /// All-zero defects living on `grid` (partition with H = 1).
  static DefectField zero(const TorusGrid& grid, double time = 0.0);

  std::size_t size() const { return Rp.size(); }
  TorusGrid grid() const { return partition.output_grid(); }
  /// 1/2 tr Rv + Rp / (gamma - 1) at one cell.
  double energy_density(std::size_t k, const EosParams& eos) const;
  /// Integral of energy_density over the domain.
  double energy(const EosParams& eos) const;
  /// Smallest eigenvalue of Rv and smallest Rp over all cells.
  double min_rv_eigenvalue() const;
  double min_rp() const;
  /// PSD / non-negativity up to -tol_rel * scale, scale = max(1, max |entry|).
  bool satisfies_invariants(double tol_rel = 1e-12) const;
};

/// One weighted state of a convex mixture.
struct WeightedState {
  double rho = 0.0;
  Vec2 mom{0.0, 0.0};
  double weight = 0.0;
};

struct MixtureDefect {
  double rho = 0.0;
  Vec2 mom{0.0, 0.0};
  Sym2 Rv;
  double Rp = 0.0;
};

/// Mean state and convexity defects of a mixture whose weights sum to one.
/// Throws InadmissibleBlockError if a vacuum state carries momentum.
MixtureDefect mixture_defect(const std::vector<WeightedState>& states, const EosParams& eos);

ConservedField coarse_grain(const ConservedField& field, const BlockPartition& partition);

/// <p(rho)> - p(<rho>) per output cell; non-negative by Jensen.
std::vector<double> pressure_defect(const ConservedField& field, const BlockPartition& partition,
                                    const EosParams& eos);

/// <m (x) m / rho> - <m> (x) <m> / <rho> per output cell, evaluated in the
/// Gram form sum_i w_i rho_i (u_i - ubar) (x) (u_i - ubar), which is PSD by
/// construction. Throws InadmissibleBlockError for vacuum cells carrying
/// momentum.
std::vector<Sym2> reynolds_defect(const ConservedField& field, const BlockPartition& partition);

DefectField defect_field(const ConservedField& field, const BlockPartition& partition,
                         const EosParams& eos);

/// One defect field per snapshot.
std::vector<DefectField> defect_history(const Trajectory& traj, const BlockPartition& partition,
                                        const EosParams& eos);

struct BookkeepingReport {
  std::vector<double> residual;
  double max_abs = 0.0;
  /// max_abs divided by the largest averaged energy density.
  double max_relative = 0.0;
};

/// Checks <E> = E(<rho>, <m>) + 1/2 tr Rv + Rp / (gamma - 1) per output cell.
BookkeepingReport energy_bookkeeping(const ConservedField& field, const BlockPartition& partition,
                                     const EosParams& eos);

struct SequenceMember {
  double epsilon = 0.0;
  Trajectory trajectory;
};

struct SequenceDefect {
  /// Defects of the finest (smallest epsilon) member on the common coarse grid.
  DefectField limit;
  /// Members sorted by decreasing epsilon.
  std::vector<double> epsilons;
  std::vector<double> defect_energy;
  /// L1 distance (over Rv entries and Rp) between consecutive members.
  std::vector<double> cauchy;
  bool cauchy_decreasing = false;
};

/// Defects of a vanishing-viscosity sequence at time t. Members may live on
/// different grids; every member is averaged onto the coarse grid of
/// `partition` (which must use Block mode).
SequenceDefect sequence_defect(const std::vector<SequenceMember>& members,
                               const BlockPartition& partition, const EosParams& eos, double t);

// Template implementation.

template <class Fn>
void BlockPartition::for_each_member(std::size_t out, Fn&& fn) const {
  const auto oc = output_grid().coords(out);
  if (mode == AveragingMode::Block) {
    const double w = grid.dim == 1 ? 1.0 / block : 1.0 / (static_cast<double>(block) * block);
    const int jmax = grid.dim == 1 ? 1 : block;
    for (int dj = 0; dj < jmax; ++dj) {
      for (int di = 0; di < block; ++di) {
        fn(grid.index(oc[0] * block + di, oc[1] * block + dj), w);
      }
    }
    return;
  }
  const auto& t = taps_;
  if (grid.dim == 1) {
    for (const Tap& a : t) fn(grid.index(oc[0] + a.offset), a.weight);
    return;
  }
  for (const Tap& b : t) {
    for (const Tap& a : t) {
      fn(grid.index(oc[0] + a.offset, oc[1] + b.offset), a.weight * b.weight);
    }
  }
}

}  // namespace dlab
