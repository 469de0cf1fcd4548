#include "dlab/oscillation_lab.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dlab {

namespace {

constexpr double kRestTolerance = 1e-12;
constexpr double kRoundoff = 1e-13;

std::string block_label(const CellBlock& b) {
  return "[" + std::to_string(b.i0) + "," + std::to_string(b.i1) + ")x[" + std::to_string(b.j0) +
         "," + std::to_string(b.j1) + ")";
}

/// int_0^T psi' a + psi b with psi = (t/T)^j, a and b linear between samples.
double time_pairing(const std::vector<double>& a, const std::vector<double>& b, double period,
                    int j, const std::vector<std::size_t>& idx) {
  const double M = static_cast<double>(a.size() - 1);
  auto psi = [&](double t) { return std::pow(t / period, j); };
  auto dpsi = [&](double t) {
    return j == 0 ? 0.0 : j * std::pow(t / period, j - 1) / period;
  };
  double total = 0.0;
  for (std::size_t q = 0; q + 1 < idx.size(); ++q) {
    const std::size_t k0 = idx[q], k1 = idx[q + 1];
    const double t0 = period * static_cast<double>(k0) / M;
    const double t1 = period * static_cast<double>(k1) / M;
    const double dt = t1 - t0;
    for (std::size_t g = 0; g < detail::kGaussX.size(); ++g) {
      const double s = detail::kGaussX[g];
      const double t = t0 + s * dt;
      const double av = (1.0 - s) * a[k0] + s * a[k1];
      const double bv = (1.0 - s) * b[k0] + s * b[k1];
      total += detail::kGaussW[g] * dt * (dpsi(t) * av + psi(t) * bv);
    }
  }
  return total;
}

std::vector<std::size_t> every_index(std::size_t last) {
  std::vector<std::size_t> idx(last + 1);
  for (std::size_t k = 0; k <= last; ++k) idx[k] = k;
  return idx;
}

std::vector<std::size_t> every_other_index(std::size_t last) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k <= last; k += 2) idx.push_back(k);
  if (idx.back() != last) idx.push_back(last);
  return idx;
}

ResidualEntry time_entry(std::string id, const std::vector<double>& a,
                         const std::vector<double>& b, double period, int j, bool constant) {
  const std::size_t last = a.size() - 1;
  ResidualEntry e;
  e.id = std::move(id);
  e.residual = time_pairing(a, b, period, j, every_index(last));
  e.quadrature_estimate = std::abs(e.residual - time_pairing(a, b, period, j, every_other_index(last)));
  e.constant = constant;
  return e;
}

/// (b^(p+1) - a^(p+1)) / ((p + 1)(b - a)) without the cancellation.
double power_mean(double a, double b, int p) {
  double s = 0.0;
  for (int k = 0; k <= p; ++k) s += std::pow(a, k) * std::pow(b, p - k);
  return s / (p + 1);
}

/// Neumaier-compensated sum of (f - g) phi; the cells number in the tens of
/// thousands and plain summation drifts well above the pairings of interest.
double pair_difference(const std::vector<double>& f, const std::vector<double>* g,
                       const std::vector<double>& phi) {
  double s = 0.0, comp = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double v = (g ? f[c] - (*g)[c] : f[c]) * phi[c];
    const double t = s + v;
    comp += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + comp;
}

double pair(const std::vector<double>& f, const std::vector<double>& phi) {
  return pair_difference(f, nullptr, phi);
}

double pair_abs(const std::vector<double>& f, const std::vector<double>& phi) {
  double s = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) s += std::abs(f[c] * phi[c]);
  return s;
}

}  // namespace

std::size_t CellBlock::cell_count() const {
  if (i1 <= i0 || j1 <= j0) return 0;
  return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
}

Vec2 CellBlock::lower(const TorusGrid& grid) const {
  const double h = grid.spacing();
  return {-1.0 + i0 * h, grid.dim == 2 ? -1.0 + j0 * h : 0.0};
}

Vec2 CellBlock::upper(const TorusGrid& grid) const {
  const double h = grid.spacing();
  return {-1.0 + i1 * h, grid.dim == 2 ? -1.0 + j1 * h : 0.0};
}

std::size_t CellBlock::global_index(const TorusGrid& grid, std::size_t k) const {
  const auto w = static_cast<std::size_t>(width());
  return grid.index(i0 + static_cast<int>(k % w), j0 + static_cast<int>(k / w));
}

void PatchSpec::validate(const EosParams& eos) const {
  eos.validate();
  if (blocks.empty()) throw DomainError("patch spec needs at least one block");
  if (rho.size() != blocks.size()) {
    throw IncompatibleError("patch spec has " + std::to_string(blocks.size()) + " blocks but " +
                            std::to_string(rho.size()) + " densities");
  }
  if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("patch period must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("Lambda must be positive");
  const int n = grid.cells_per_axis;
  const int ny = grid.dim == 2 ? n : 1;
  std::vector<int> owner(grid.cell_count(), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.i0 < 0 || blk.i1 > n || blk.j0 < 0 || blk.j1 > ny || blk.cell_count() == 0) {
      throw DomainError("block " + block_label(blk) + " is empty or leaves the grid");
    }
    if (!(rho[b] > 0.0) || !std::isfinite(rho[b])) {
      throw DomainError("block densities must be positive, block " + std::to_string(b) + " has " +
                        std::to_string(rho[b]));
    }
    for (int j = blk.j0; j < blk.j1; ++j) {
      for (int i = blk.i0; i < blk.i1; ++i) {
        auto& o = owner[grid.index(i, j)];
        if (o >= 0) {
          throw IncompatibleError("blocks " + std::to_string(o) + " and " + std::to_string(b) +
                                  " overlap");
        }
        o = static_cast<int>(b);
      }
    }
    const double need = pressure(rho[b], eos) * grid.dim / 2.0;
    if (lambda < need) {
      throw InfeasibleConstraintError("Lambda = " + std::to_string(lambda) + " is below p(rho) dim / 2 = " +
                                      std::to_string(need) + " in block " + std::to_string(b));
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw IncompatibleError("blocks do not cover the grid");
  }
}

std::vector<std::size_t> PatchSpec::block_map() const {
  std::vector<std::size_t> map(grid.cell_count(), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t k = 0; k < blocks[b].cell_count(); ++k) map[blocks[b].global_index(grid, k)] = b;
  }
  return map;
}

PatchSpec PatchSpec::dyadic(const TorusGrid& grid, int level, std::vector<double> rho,
                            double period, double lambda) {
  if (level < 0 || level > 30) throw DomainError("dyadic level out of range");
  const int per_axis = 1 << level;
  if (grid.cells_per_axis % per_axis != 0) {
    throw IncompatibleError(std::to_string(per_axis) + " blocks per axis do not divide N = " +
                            std::to_string(grid.cells_per_axis));
  }
  const int w = grid.cells_per_axis / per_axis;
  PatchSpec spec;
  spec.grid = grid;
  spec.rho = std::move(rho);
  spec.period = period;
  spec.lambda = lambda;
  const int by = grid.dim == 2 ? per_axis : 1;
  for (int bj = 0; bj < by; ++bj) {
    for (int bi = 0; bi < per_axis; ++bi) {
      CellBlock b{bi * w, (bi + 1) * w, 0, 1};
      if (grid.dim == 2) {
        b.j0 = bj * w;
        b.j1 = (bj + 1) * w;
      }
      spec.blocks.push_back(b);
    }
  }
  return spec;
}

double kinetic_constraint_momentum(double rho, double lambda, const EosParams& eos, int dim) {
  eos.validate();
  if (!(rho > 0.0)) throw DomainError("block density must be positive");
  if (dim != 1 && dim != 2) throw DomainError("dimension must be 1 or 2");
  const double room = lambda - pressure(rho, eos) * dim / 2.0;
  if (room < 0.0) {
    throw InfeasibleConstraintError("Lambda = " + std::to_string(lambda) +
                                    " leaves no kinetic energy at rho = " + std::to_string(rho));
  }
  return std::sqrt(2.0 * rho * room);
}

BlockHistory BlockHistory::zero(const CellBlock& block, std::size_t steps) {
  BlockHistory h;
  h.samples.assign(steps + 1, std::vector<Vec2>(block.cell_count(), Vec2{0.0, 0.0}));
  return h;
}

Trajectory patchwork_assemble(const PatchSpec& spec, const EosParams& eos,
                              const std::vector<BlockHistory>& histories, double horizon) {
  spec.validate(eos);
  if (histories.size() != spec.blocks.size()) {
    throw IncompatibleError("need one history per block");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be non-negative");
  const std::size_t steps = histories.front().steps();
  if (steps == 0) throw DomainError("block histories need at least two samples");
  for (std::size_t b = 0; b < histories.size(); ++b) {
    const auto& h = histories[b];
    if (h.steps() != steps) throw IncompatibleError("block histories must share one sampling");
    for (const auto& s : h.samples) {
      if (s.size() != spec.blocks[b].cell_count()) {
        throw IncompatibleError("history of block " + std::to_string(b) + " has the wrong cell count");
      }
    }
    for (std::size_t k : {std::size_t{0}, steps}) {
      for (const auto& m : h.samples[k]) {
        if (std::abs(m[0]) > kRestTolerance || std::abs(m[1]) > kRestTolerance) {
          throw DomainError("block " + std::to_string(b) + " is not at rest at local time " +
                            (k == 0 ? std::string("0") : std::string("T")));
        }
      }
    }
  }

  const double M = static_cast<double>(steps);
  const auto last = static_cast<std::size_t>(std::floor(horizon / spec.period * M + 1e-9));
  ConservedField base(spec.grid, 0.0);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    for (std::size_t k = 0; k < spec.blocks[b].cell_count(); ++k) {
      base.rho[spec.blocks[b].global_index(spec.grid, k)] = spec.rho[b];
    }
  }
  Trajectory traj;
  for (std::size_t k = 0; k <= last; ++k) {
    ConservedField f = base;
    f.time = spec.period * static_cast<double>(k) / M;
    const std::size_t local = k % steps;
    for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
      const auto& s = histories[b].samples[local];
      for (std::size_t c = 0; c < s.size(); ++c) {
        Vec2 m = s[c];
        if (spec.grid.dim == 1) m[1] = 0.0;
        f.mom[spec.blocks[b].global_index(spec.grid, c)] = m;
      }
    }
    traj.push_back(std::move(f));
  }
  return traj;
}

Sym2 tracefree_flux(double rho, const Vec2& mom, int dim) {
  if (!(rho > 0.0)) throw DomainError("trace-free flux needs positive density");
  if (dim == 1) return Sym2{0.0, 0.0, 0.0};
  // Writing the diagonal as +-half the difference keeps the trace exactly zero.
  const Sym2 t = (1.0 / rho) * Sym2::outer(mom, mom);
  const double half = 0.5 * (t.xx - t.yy);
  const Sym2 out{half, t.xy, -half};
  return out;
}

BlockPolynomialBank::BlockPolynomialBank(const TorusGrid& grid, const CellBlock& block, int degree,
                                         int time_degree)
    : block_(block), dim_(grid.dim), time_degree_(time_degree) {
  if (degree < 0 || time_degree < 0) throw DomainError("polynomial degrees must be non-negative");
  if (block.cell_count() == 0) throw DomainError("empty block");
  const double h = grid.spacing();
  half_width_ = {0.5 * block.width() * h, dim_ == 2 ? 0.5 * block.height() * h : 1.0};
  for (int total = 0; total <= degree; ++total) {
    for (int b = 0; b <= (dim_ == 2 ? total : 0); ++b) powers_.push_back({total - b, b});
  }

  // Per-axis integrals of xi^p and d/dx xi^p over each cell, xi in [-1, 1].
  auto axis_tables = [](int cells, double r, int p, std::vector<double>& val,
                        std::vector<double>& der) {
    val.assign(static_cast<std::size_t>(cells), 0.0);
    der.assign(static_cast<std::size_t>(cells), 0.0);
    for (int c = 0; c < cells; ++c) {
      const double a = -1.0 + 2.0 * c / cells;
      const double b = -1.0 + 2.0 * (c + 1) / cells;
      val[static_cast<std::size_t>(c)] = r * (b - a) * power_mean(a, b, p);
      der[static_cast<std::size_t>(c)] = p == 0 ? 0.0 : (b - a) * p * power_mean(a, b, p - 1);
    }
  };
  const std::size_t w = static_cast<std::size_t>(block.width());
  for (const auto& pw : powers_) {
    std::vector<double> vx, dx, vy{1.0}, dy{0.0};
    axis_tables(block.width(), half_width_[0], pw[0], vx, dx);
    if (dim_ == 2) axis_tables(block.height(), half_width_[1], pw[1], vy, dy);
    std::vector<double> phi(block.cell_count());
    std::vector<Vec2> grad(block.cell_count());
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const std::size_t i = k % w, j = k / w;
      phi[k] = vx[i] * vy[j];
      grad[k] = {dx[i] * vy[j], vx[i] * dy[j]};
    }
    phi_.push_back(std::move(phi));
    grad_.push_back(std::move(grad));
  }
}

std::string BlockPolynomialBank::id(std::size_t k) const {
  std::string s = "x" + std::to_string(powers_[k][0]);
  if (dim_ == 2) s += "y" + std::to_string(powers_[k][1]);
  return s;
}

double BlockPolynomialBank::grad_sup(std::size_t k) const {
  const double gx = powers_[k][0] / half_width_[0];
  const double gy = dim_ == 2 ? powers_[k][1] / half_width_[1] : 0.0;
  return std::hypot(gx, gy);
}

NoFluxReport noflux_weak_residual(const BlockHistory& history, double rho, double period,
                                  const BlockPolynomialBank& bank) {
  if (history.steps() == 0) throw DomainError("block history needs at least two samples");
  if (!(period > 0.0)) throw DomainError("period must be positive");
  const std::size_t cells = bank.block().cell_count();
  for (const auto& s : history.samples) {
    if (s.size() != cells) throw IncompatibleError("history does not match the bank's block");
  }
  const std::size_t K = history.samples.size();
  const int d = bank.dim();

  NoFluxReport out;
  out.divergence.bank = "block-polynomial";
  out.momentum.bank = "block-polynomial";
  out.divergence.tau = out.momentum.tau = period;
  out.divergence.snapshot_spacing = out.momentum.snapshot_spacing =
      period / static_cast<double>(history.steps());

  std::vector<std::vector<Sym2>> flux(K, std::vector<Sym2>(cells));
  for (std::size_t t = 0; t < K; ++t) {
    for (std::size_t c = 0; c < cells; ++c) flux[t][c] = tracefree_flux(rho, history.samples[t][c], d);
  }

  const std::vector<double> zeros(K, 0.0);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto& phi = bank.phi(k);
    const auto& grad = bank.grad(k);
    std::vector<double> div_b(K, 0.0);
    std::vector<std::vector<double>> mom_a(static_cast<std::size_t>(d), std::vector<double>(K, 0.0));
    auto mom_b = mom_a;
    for (std::size_t t = 0; t < K; ++t) {
      for (std::size_t c = 0; c < cells; ++c) {
        const Vec2& m = history.samples[t][c];
        div_b[t] += dot(m, grad[c]);
        const Vec2 fg = flux[t][c].apply(grad[c]);
        for (int comp = 0; comp < d; ++comp) {
          mom_a[static_cast<std::size_t>(comp)][t] += m[comp] * phi[c];
          mom_b[static_cast<std::size_t>(comp)][t] += fg[comp];
        }
      }
    }
    for (int j = 0; j <= bank.time_degree(); ++j) {
      const std::string tid = ":s" + std::to_string(j);
      out.divergence.add(time_entry(bank.id(k) + tid, zeros, div_b, period, j, bank.constant(k)));
      for (int comp = 0; comp < d; ++comp) {
        const auto ci = static_cast<std::size_t>(comp);
        out.momentum.add(time_entry("m" + std::to_string(comp) + ":" + bank.id(k) + tid, mom_a[ci],
                                    mom_b[ci], period, j, bank.constant(k)));
      }
    }
  }
  return out;
}

BlockHistory divergence_free_bump(const TorusGrid& grid, const CellBlock& block,
                                  std::size_t steps, double amplitude) {
  if (grid.dim != 2) throw DomainError("a divergence-free bump needs two dimensions");
  if (steps == 0) throw DomainError("need at least one step");
  if (block.cell_count() == 0) throw DomainError("empty block");
  const Vec2 lo = block.lower(grid), hi = block.upper(grid);
  const double rx = 0.5 * (hi[0] - lo[0]), ry = 0.5 * (hi[1] - lo[1]);
  std::vector<Vec2> shape(block.cell_count());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const Vec2 x = grid.center(block.global_index(grid, k));
    const double xi = (x[0] - lo[0]) / rx - 1.0;
    const double eta = (x[1] - lo[1]) / ry - 1.0;
    const double fx = (1.0 - xi * xi) * (1.0 - xi * xi);
    const double fy = (1.0 - eta * eta) * (1.0 - eta * eta);
    const double dfx = -4.0 * xi * (1.0 - xi * xi) / rx;
    const double dfy = -4.0 * eta * (1.0 - eta * eta) / ry;
    shape[k] = {amplitude * fx * dfy, -amplitude * dfx * fy};
  }
  BlockHistory h;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double s =
        (k == 0 || k == steps) ? 0.0 : std::sin(std::numbers::pi * static_cast<double>(k) / steps);
    std::vector<Vec2> sample(shape.size());
    for (std::size_t c = 0; c < shape.size(); ++c) sample[c] = s * shape[c];
    h.samples.push_back(std::move(sample));
  }
  return h;
}

std::vector<Vec2> extract_block(const ConservedField& field, const CellBlock& block) {
  std::vector<Vec2> out(block.cell_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = field.mom[block.global_index(field.grid, k)];
  return out;
}

OscillatingSequence checkerboard_sequence(double rho_bar, double delta, int n_max,
                                          const TorusGrid& grid, bool shrinking) {
  if (!(rho_bar > 0.0)) throw DomainError("mean density must be positive");
  if (!(delta >= 0.0) || !(delta < rho_bar)) {
    throw DomainError("checkerboard amplitude must satisfy 0 <= delta < rho_bar");
  }
  if (n_max < 0 || n_max > 29) throw DomainError("n_max out of range");
  const int finest = 1 << (n_max + 1);
  if (grid.cells_per_axis % finest != 0) {
    throw IncompatibleError(std::to_string(finest) + " patches per axis do not divide N = " +
                            std::to_string(grid.cells_per_axis));
  }
  OscillatingSequence seq;
  seq.delta = delta;
  seq.target = ConservedField::uniform(grid, rho_bar, {0.0, 0.0});
  for (int n = 0; n <= n_max; ++n) {
    const int patch = grid.cells_per_axis / (1 << (n + 1));
    const double amp = shrinking ? std::ldexp(delta, -n) : delta;
    ConservedField f(grid, 0.0);
    for (std::size_t c = 0; c < f.size(); ++c) {
      const auto ij = grid.coords(c);
      const bool up = ((ij[0] / patch) + (ij[1] / patch)) % 2 == 0;
      f.rho[c] = up ? rho_bar + amp : rho_bar - amp;
    }
    seq.members.push_back(std::move(f));
    seq.periods.push_back(std::ldexp(1.0, -n));
  }
  return seq;
}

std::vector<SpatialTest> spatial_tests(const TestFunctionBank& bank, const TorusGrid& grid) {
  if (bank.dim() != grid.dim) throw IncompatibleError("bank and grid dimensions differ");
  std::vector<SpatialTest> out;
  const std::size_t per_mode = bank.envelopes().size();
  for (std::size_t m = 0; m < bank.modes().size(); ++m) {
    const auto& mode = bank.modes()[m];
    SpatialTest t;
    t.id = mode.id(grid.dim);
    t.phi = bank.scalar_test(m * per_mode, grid).phi;
    t.grad_sup = std::numbers::pi * std::hypot(mode.kx, grid.dim == 2 ? mode.ky : 0);
    t.constant = mode.constant();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<SpatialTest> polynomial_tests(const TorusGrid& grid, int degree) {
  const CellBlock whole{0, grid.cells_per_axis, 0, grid.dim == 2 ? grid.cells_per_axis : 1};
  const BlockPolynomialBank bank(grid, whole, degree, 0);
  std::vector<SpatialTest> out;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    out.push_back({bank.id(k), bank.phi(k), bank.grad_sup(k), bank.constant(k)});
  }
  return out;
}

WeakStarReport weakstar_diagnostics(const OscillatingSequence& seq,
                                    const std::vector<SpatialTest>& tests) {
  if (seq.members.size() < 3) throw DomainError("weak-* diagnostics need at least three members");
  const TorusGrid& grid = seq.target.grid;
  for (const auto& m : seq.members) {
    if (!(m.grid == grid)) throw IncompatibleError("sequence members must share the target grid");
  }
  for (const auto& t : tests) {
    if (t.phi.size() != grid.cell_count()) throw IncompatibleError("test " + t.id + " has the wrong size");
  }
  WeakStarReport rep;
  const int levels = static_cast<int>(seq.members.size());
  rep.max_difference.assign(seq.members.size(), 0.0);
  const double omega = grid.domain_volume();

  for (const auto& test : tests) {
    double prev_diff = 0.0;
    double prev_mom = 0.0;
    for (int n = 0; n < levels; ++n) {
      const auto& f = seq.members[static_cast<std::size_t>(n)];
      WeakStarRow row;
      row.level = n;
      row.id = test.id;
      row.rho_pairing = pair(f.rho, test.phi);
      row.rho_difference = pair_difference(f.rho, &seq.target.rho, test.phi);
      double mom_scale = 0.0;
      for (int c = 0; c < grid.dim; ++c) {
        double s = 0.0, sa = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
          s += f.mom[k][c] * test.phi[k];
          sa += std::abs(f.mom[k][c] * test.phi[k]);
        }
        row.mom_pairing = std::max(row.mom_pairing, std::abs(s));
        mom_scale = std::max(mom_scale, sa);
      }
      const double patch = 2.0 / std::ldexp(1.0, n + 1);
      row.bound = 0.5 * seq.delta * omega * test.grad_sup * patch;

      const double diff = std::abs(row.rho_difference);
      const double floor = kRoundoff * (pair_abs(f.rho, test.phi) + pair_abs(seq.target.rho, test.phi));
      if (diff > row.bound + floor) rep.bounded = false;
      if (n > kFirstRatioLevel && diff > floor) {
        const double ratio = prev_diff > 0.0 ? diff / prev_diff : kInfinity;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (ratio > kGeometricRatio) rep.geometric = false;
      }
      const double mom_floor = kRoundoff * mom_scale;
      if (n > 0 && row.mom_pairing > prev_mom + mom_floor) rep.momentum_vanishes = false;
      if (n == levels - 1 && row.mom_pairing > mom_floor) rep.momentum_vanishes = false;
      rep.max_difference[static_cast<std::size_t>(n)] =
          std::max(rep.max_difference[static_cast<std::size_t>(n)], diff);
      prev_diff = diff;
      prev_mom = row.mom_pairing;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

WeakStarReport weakstar_diagnostics(const OscillatingSequence& seq, const TestFunctionBank& bank) {
  return weakstar_diagnostics(seq, spatial_tests(bank, seq.target.grid));
}

SeparationReport l1_separation(const OscillatingSequence& seq) {
  if (seq.members.size() < 3) throw DomainError("separation needs at least three members");
  SeparationReport rep;
  const double vol = seq.target.grid.cell_volume();
  for (const auto& f : seq.members) {
    if (!(f.grid == seq.target.grid)) throw IncompatibleError("sequence members must share the target grid");
    double s = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) s += std::abs(f.rho[c] - seq.target.rho[c]);
    rep.distances.push_back(s * vol);
  }
  rep.estimate = *std::min_element(rep.distances.begin(), rep.distances.end());
  rep.threshold = 0.5 * seq.delta * seq.target.grid.domain_volume();
  rep.separated = rep.estimate > 0.0 && rep.estimate >= rep.threshold;
  return rep;
}

}  // namespace dlab
