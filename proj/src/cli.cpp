#include "dlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <ostream>
#include <thread>

#include "dlab/dissipative_analysis.hpp"
#include "dlab/io.hpp"
#include "dlab/manifest.hpp"
#include "dlab/oscillation_lab.hpp"
#include "dlab/scenarios.hpp"
#include "dlab/selection.hpp"
#include "dlab/weak_form.hpp"

namespace dlab {

namespace fs = std::filesystem;

namespace {

const char* pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

/// Runs fn(0..n-1) on up to `threads` workers. Results are stored by index
/// so the outcome does not depend on scheduling; the lowest-index failure is
/// rethrown.
template <class R>
std::vector<R> parallel_jobs(std::size_t n, int threads, const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto k = static_cast<std::size_t>(std::clamp(threads, 1, 64));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(k, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> res;
  res.reserve(n);
  for (auto& r : out) res.push_back(std::move(*r));
  return res;
}

/// Index of the configured name in `names`, or a ConfigError at the value.
std::size_t choice(const Config& cfg, const std::string& section, const std::string& key,
                   const std::vector<std::string>& names, std::size_t fallback = 0) {
  if (!cfg.has(section, key)) return fallback;
  const auto& e = cfg.entry(section, key);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (e.value == names[i]) return i;
  }
  std::string all;
  for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
  throw ConfigError(cfg.source() + ": " + key + " must be one of " + all + ", got '" + e.value + "'",
                    e.line, e.value_column);
}

int positive_int(const Config& cfg, const std::string& section, const std::string& key,
                 long long fallback) {
  const long long v = cfg.get_int(section, key, fallback);
  if (v < 1 || v > (1 << 20)) {
    const auto& e = cfg.entry(section, key);
    throw ConfigError(cfg.source() + ": " + key + " must be a positive integer", e.line, e.value_column);
  }
  return static_cast<int>(v);
}

struct Context {
  const Config& cfg;
  fs::path out;
  int threads = 1;
  std::uint64_t seed = 0;
  std::ostream& log;
  RunManifest& manifest;
};

EosParams eos_from(const Config& cfg) {
  EosParams eos{cfg.get_double("eos", "a", 1.0), cfg.get_double("eos", "gamma", 1.4)};
  eos.validate();
  return eos;
}

TorusGrid grid_from(const Config& cfg, std::optional<int> cells = std::nullopt) {
  const int dim = positive_int(cfg, "grid", "dim", 1);
  if (dim > 2) throw DomainError("grid dim must be 1 or 2");
  return TorusGrid(dim, cells ? *cells : positive_int(cfg, "grid", "cells", 128));
}

ConservedField initial_from(const Context& ctx, const TorusGrid& grid, const EosParams& eos) {
  const Config& c = ctx.cfg;
  switch (choice(c, "initial", "kind", {"constant", "riemann", "acoustic", "smooth_wave", "random"})) {
    case 0:
      return constant_state(grid, c.get_double("initial", "rho", 1.0),
                            {c.get_double("initial", "mx", 0.0), c.get_double("initial", "my", 0.0)});
    case 1:
      return riemann_1d(grid, {c.get_double("initial", "rho_left", 1.0), c.get_double("initial", "u_left", 0.0)},
                        {c.get_double("initial", "rho_right", 0.5), c.get_double("initial", "u_right", 0.0)},
                        c.get_double("initial", "x0", 0.0));
    case 2:
      return acoustic_pulse(grid, c.get_double("initial", "amplitude", 1e-3), eos);
    case 3:
      return smooth_wave(grid, c.get_double("initial", "amplitude", 0.2));
    default:
      return random_smooth(grid, ctx.seed, c.get_double("initial", "amplitude", 0.2));
  }
}

ViscosityModel model_from(const Config& cfg, std::optional<double> epsilon = std::nullopt) {
  ViscosityModel m{epsilon ? *epsilon : cfg.get_double("solver", "epsilon", 1e-2),
                   cfg.get_double("solver", "shear_mu", 1.0), cfg.get_double("solver", "bulk_eta", 1.0)};
  m.validate();
  return m;
}

SolverConfig solver_from(const Config& cfg) {
  SolverConfig s;
  s.cfl = cfg.get_double("solver", "cfl", s.cfl);
  s.end_time = cfg.get_double("solver", "end_time", s.end_time);
  s.output_stride = cfg.get_double("solver", "output_stride", s.output_stride);
  s.dt_min = cfg.get_double("solver", "dt_min", s.dt_min);
  s.density_floor = cfg.get_double("solver", "density_floor", s.density_floor);
  s.flux = choice(cfg, "solver", "flux", {"rusanov", "central"}) == 0 ? FluxKind::Rusanov
                                                                      : FluxKind::CentralDissipative;
  s.time_scheme = choice(cfg, "solver", "scheme", {"rk2", "euler"}) == 0 ? TimeScheme::Rk2 : TimeScheme::Euler;
  s.validate();
  return s;
}

BlockPartition partition_from(const Config& cfg, const TorusGrid& grid, int fallback_block) {
  const auto mode = choice(cfg, "defects", "mode", {"block", "window"}) == 0 ? AveragingMode::Block
                                                                             : AveragingMode::Window;
  return BlockPartition(grid, positive_int(cfg, "defects", "block", fallback_block), mode);
}

TestFunctionBank bank_from(const Config& cfg, int dim, double horizon) {
  return TestFunctionBank(dim, cfg.get_double("bank", "horizon", horizon),
                          positive_int(cfg, "bank", "max_mode", 3), positive_int(cfg, "bank", "envelopes", 2));
}

std::string describe_run(const ViscosityModel& m, const TorusGrid& g) {
  return "viscous run, eps " + CsvWriter::number(m.epsilon) + ", N " + std::to_string(g.cells_per_axis) +
         ", dim " + std::to_string(g.dim);
}

fs::path ensure_dir(const fs::path& p) {
  fs::create_directories(p);
  return p;
}

RunResult solve_with(const Context& ctx, const EosParams& eos, const TorusGrid& grid,
                     const ViscosityModel& model) {
  return run(initial_from(ctx, grid, eos), eos, model, solver_from(ctx.cfg));
}

bool ledger_ok(const EnergyLedger& l) {
  return l.min_slack() >= -1e-6 * std::abs(l.initial_energy()) && l.dissipation_monotone();
}

int cmd_solve(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  const auto grid = grid_from(ctx.cfg);
  const auto model = model_from(ctx.cfg);
  const auto res = solve_with(ctx, eos, grid, model);
  const auto part = partition_from(ctx.cfg, grid, 1);
  const auto rec = make_record(res, eos, part.block, part.mode, describe_run(model, grid));
  ctx.manifest.add_outputs(write_record(ctx.out / "record", rec));
  ctx.manifest.add_output(write_ledger(ctx.out / "run_ledger.csv", res.ledger));

  const bool ok = ledger_ok(res.ledger);
  ctx.manifest.verdict("energy_inequality", pass_fail(ok));
  ctx.manifest.verdict("min_slack", res.ledger.min_slack());
  ctx.manifest.verdict("initial_energy", res.ledger.initial_energy());
  ctx.manifest.verdict("steps", res.steps);
  ctx.manifest.verdict("rejections", res.rejections);
  ctx.log << "solve: " << res.steps << " steps, min slack " << res.ledger.min_slack() << ", "
          << pass_fail(ok) << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_defects(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  const auto grid = grid_from(ctx.cfg);
  const auto model = model_from(ctx.cfg);
  const auto res = solve_with(ctx, eos, grid, model);
  const auto fallback = BlockPartition::default_for(grid).block;
  const auto part = partition_from(ctx.cfg, grid, fallback);
  const auto rec = make_record(res, eos, part.block, part.mode, describe_run(model, grid));
  ctx.manifest.add_outputs(write_record(ctx.out / "record", rec));

  CsvWriter table({"time", "bookkeeping_max_abs", "bookkeeping_max_relative", "min_rv_eigenvalue",
                   "min_rp", "defect_energy"});
  double worst = 0.0;
  bool invariants = true;
  for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
    const auto book = energy_bookkeeping(res.trajectory[k], part, eos);
    const auto& d = rec.defects[k];
    worst = std::max(worst, book.max_relative);
    invariants = invariants && d.satisfies_invariants();
    table.row(std::vector<double>{d.time, book.max_abs, book.max_relative, d.min_rv_eigenvalue(), d.min_rp(),
                                  d.energy(eos)});
  }
  table.write(ctx.out / "defects.csv");
  ctx.manifest.add_output(ctx.out / "defects.csv");

  const bool ok = worst <= 1e-11 && invariants;
  ctx.manifest.verdict("bookkeeping", pass_fail(worst <= 1e-11));
  ctx.manifest.verdict("bookkeeping_max_relative", worst);
  ctx.manifest.verdict("defect_invariants", pass_fail(invariants));
  ctx.manifest.verdict("block", part.block);
  ctx.log << "defects: H " << part.block << ", bookkeeping " << worst << ", " << pass_fail(ok) << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_verify(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  const auto model = model_from(ctx.cfg);
  DissipativeRecord rec;
  if (ctx.cfg.has("verify", "record")) {
    const fs::path dir = ctx.cfg.get_string("verify", "record");
    if (!fs::is_directory(dir)) throw IoError("input record directory not found: " + dir.string());
    rec = read_record(dir);
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.is_regular_file()) ctx.manifest.add_input(f.path());
    }
  } else {
    const auto grid = grid_from(ctx.cfg);
    const auto part = partition_from(ctx.cfg, grid, 1);
    rec = make_record(solve_with(ctx, eos, grid, model), eos, part.block, part.mode, describe_run(model, grid));
    ctx.manifest.add_outputs(write_record(ctx.out / "record", rec));
  }

  const auto& traj = rec.trajectory;
  const auto bank = bank_from(ctx.cfg, traj.grid().dim, traj.back().time);
  const double tau = std::min(bank.horizon(), traj.back().time);
  const auto cont = continuity_residual(traj, bank, tau);
  const auto mom = momentum_residual(traj, bank, tau, eos, &rec.defects);
  const auto visc = viscous_pairing(traj, bank, tau, model);
  const auto energy = energy_inequality_check(traj, rec.ledger, bank, eos, &rec.defects);
  const auto audit = audit_record(rec, eos);

  const double scale = std::max(1.0, std::abs(rec.ledger.initial_energy()));
  const double tol = ctx.cfg.get_double("verify", "tolerance", 1e-9) * scale;
  CsvWriter table({"equation", "id", "residual", "quadrature_estimate"});
  for (const auto& e : cont.entries) {
    table.row({"continuity", e.id, CsvWriter::number(e.residual), CsvWriter::number(e.quadrature_estimate)});
  }
  double mom_max = 0.0;
  for (std::size_t i = 0; i < mom.entries.size(); ++i) {
    const auto& e = mom.entries[i];
    const double r = e.residual + visc.entries[i].residual;
    mom_max = std::max(mom_max, std::abs(r));
    table.row({"momentum", e.id, CsvWriter::number(r),
               CsvWriter::number(e.quadrature_estimate + visc.entries[i].quadrature_estimate)});
  }
  table.write(ctx.out / "residuals.csv");
  ctx.manifest.add_output(ctx.out / "residuals.csv");

  CsvWriter slack({"envelope", "min_slack", "tau1", "tau2"});
  for (const auto& e : energy.envelopes) {
    slack.row({e.envelope, CsvWriter::number(e.min_slack), CsvWriter::number(e.tau1), CsvWriter::number(e.tau2)});
  }
  slack.write(ctx.out / "energy_slack.csv");
  ctx.manifest.add_output(ctx.out / "energy_slack.csv");

  const bool c_ok = cont.max_abs <= tol;
  const bool m_ok = mom_max <= tol;
  const bool ok = c_ok && m_ok && energy.pass && audit.ok();
  ctx.manifest.verdict("continuity", pass_fail(c_ok));
  ctx.manifest.verdict("continuity_max", cont.max_abs);
  ctx.manifest.verdict("momentum", pass_fail(m_ok));
  ctx.manifest.verdict("momentum_max", mom_max);
  ctx.manifest.verdict("tolerance", tol);
  ctx.manifest.verdict("energy_inequality", pass_fail(energy.pass));
  ctx.manifest.verdict("record_audit", pass_fail(audit.ok()));
  ctx.manifest.verdict("audit_problems", audit.problems);
  ctx.log << "verify: continuity " << cont.max_abs << ", momentum " << mom_max << ", energy "
          << pass_fail(energy.pass) << ", " << pass_fail(ok) << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_sweep(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  const auto eps = ctx.cfg.get_doubles("sweep", "epsilons");
  const auto grid0 = grid_from(ctx.cfg);
  std::vector<double> cells = ctx.cfg.get_doubles("sweep", "cells", std::vector<double>{});
  if (cells.empty()) cells.assign(eps.size(), grid0.cells_per_axis);
  if (cells.size() == 1) cells.assign(eps.size(), cells.front());
  if (cells.size() != eps.size()) {
    const auto& e = ctx.cfg.entry("sweep", "cells");
    throw ConfigError(ctx.cfg.source() + ": cells needs one entry per epsilon", e.line, e.value_column);
  }
  std::vector<TorusGrid> grids;
  for (double c : cells) {
    if (c < 1 || c != std::floor(c)) throw DomainError("sweep cells must be positive integers");
    grids.emplace_back(grid0.dim, static_cast<int>(c));
  }
  const bool with_reference = ctx.cfg.get_bool("sweep", "reference", false);

  // Job i < n: member i; job n + i: inviscid reference on member i's grid.
  const std::size_t n = eps.size();
  const auto runs = parallel_jobs<RunResult>(with_reference ? 2 * n : n, ctx.threads, [&](std::size_t i) {
    const std::size_t m = i % n;
    return solve_with(ctx, eos, grids[m], model_from(ctx.cfg, i < n ? eps[m] : 0.0));
  });

  std::vector<SequenceMember> members;
  for (std::size_t i = 0; i < n; ++i) {
    const auto dir = ensure_dir(ctx.out / ("member_" + std::to_string(i)));
    ctx.manifest.add_outputs(write_trajectory(dir, runs[i].trajectory));
    ctx.manifest.add_output(write_ledger(dir / "ledger.csv", runs[i].ledger));
    members.push_back({eps[i], runs[i].trajectory});
  }

  const double end = solver_from(ctx.cfg).end_time;
  const auto table = consistency_sweep(members, bank_from(ctx.cfg, grid0.dim, end), eos);
  CsvWriter ct({"member", "epsilon", "kind", "id", "value"});
  for (const auto& r : table.rows) {
    ct.row({std::to_string(r.member), CsvWriter::number(r.epsilon), r.kind, r.id, CsvWriter::number(r.value)});
  }
  ct.write(ctx.out / "consistency.csv");
  ctx.manifest.add_output(ctx.out / "consistency.csv");

  int n_min = grids.front().cells_per_axis, n_max = n_min;
  for (const auto& g : grids) {
    n_min = std::min(n_min, g.cells_per_axis);
    n_max = std::max(n_max, g.cells_per_axis);
  }
  const int coarse = positive_int(ctx.cfg, "sweep", "coarse_cells", n_min % 16 == 0 ? 16 : n_min);
  if (n_max % coarse != 0) throw IncompatibleError("coarse_cells must divide every member grid");
  const double t_seq = ctx.cfg.get_double("sweep", "time", end);
  const auto seq = sequence_defect(members, BlockPartition(TorusGrid(grid0.dim, n_max), n_max / coarse), eos, t_seq);
  CsvWriter sd({"epsilon", "defect_energy", "cauchy_to_previous"});
  for (std::size_t k = 0; k < seq.epsilons.size(); ++k) {
    sd.row(std::vector<double>{seq.epsilons[k], seq.defect_energy[k], k == 0 ? 0.0 : seq.cauchy[k - 1]});
  }
  sd.write(ctx.out / "sequence_defects.csv");
  write_defect(ctx.out / "sequence_limit.del", seq.limit);
  ctx.manifest.add_output(ctx.out / "sequence_defects.csv");
  ctx.manifest.add_output(ctx.out / "sequence_limit.del");

  bool gap_ok = true;
  if (with_reference) {
    CsvWriter summary({"member", "epsilon", "gap_at_time", "lambda"});
    std::vector<double> gap_at;
    for (std::size_t i = 0; i < n; ++i) {
      const auto rec = make_record(runs[i], eos, 1);
      GapOptions opt;
      opt.require_initial_match = false;
      const auto curve = weak_strong_gap(rec, runs[n + i].trajectory, eos, opt);
      CsvWriter gc({"time", "relative_energy", "defect_energy", "gap"});
      for (std::size_t k = 0; k < curve.times.size(); ++k) {
        gc.row(std::vector<double>{curve.times[k], curve.relative[k], curve.defect[k], curve.gap[k]});
      }
      const auto path = ctx.out / ("gap_" + std::to_string(i) + ".csv");
      gc.write(path);
      ctx.manifest.add_output(path);
      const std::size_t k = std::min(curve.times.size() - 1, runs[i].trajectory.index_at(t_seq, 1e-9));
      gap_at.push_back(curve.gap[k]);
      summary.row(std::vector<double>{static_cast<double>(i), eps[i], curve.gap[k], curve.lambda});
    }
    summary.write(ctx.out / "gap_summary.csv");
    ctx.manifest.add_output(ctx.out / "gap_summary.csv");
    // Members are listed by decreasing epsilon in a well-posed sweep.
    for (std::size_t i = 1; i < gap_at.size(); ++i) gap_ok = gap_ok && gap_at[i] <= gap_at[i - 1];
    ctx.manifest.verdict("gap_decreasing", pass_fail(gap_ok));
  }

  const bool ok = table.e1_monotone && table.e2_monotone && table.e3_monotone && table.c_bounds_all && gap_ok;
  ctx.manifest.verdict("e1_monotone", pass_fail(table.e1_monotone));
  ctx.manifest.verdict("e2_monotone", pass_fail(table.e2_monotone));
  ctx.manifest.verdict("e3_monotone", pass_fail(table.e3_monotone));
  ctx.manifest.verdict("e3_bound", pass_fail(table.c_bounds_all));
  ctx.manifest.verdict("c_bound", table.c_bound);
  ctx.manifest.verdict("violations", table.violations);
  ctx.manifest.verdict("sequence_cauchy_decreasing", seq.cauchy_decreasing);
  ctx.log << "sweep: " << n << " members, " << pass_fail(ok) << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_select(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  Ensemble ens;
  if (ctx.cfg.has("select", "records")) {
    std::string list = ctx.cfg.get_string("select", "records");
    std::erase_if(list, [](char c) { return c == '[' || c == ']'; });
    std::size_t start = 0;
    while (start <= list.size()) {
      const std::size_t comma = std::min(list.find(',', start), list.size());
      std::string item = list.substr(start, comma - start);
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) {
        if (!fs::is_directory(item)) throw IoError("input record directory not found: " + item);
        ens.members.push_back(read_record(item));
        for (const auto& f : fs::directory_iterator(item)) {
          if (f.is_regular_file()) ctx.manifest.add_input(f.path());
        }
      }
      start = comma + 1;
    }
  } else {
    const auto eps = ctx.cfg.get_doubles("select", "epsilons");
    auto offsets = ctx.cfg.get_doubles("select", "rp_offsets", std::vector<double>(eps.size(), 0.0));
    if (offsets.size() != eps.size()) {
      const auto& e = ctx.cfg.entry("select", "rp_offsets");
      throw ConfigError(ctx.cfg.source() + ": rp_offsets needs one entry per epsilon", e.line, e.value_column);
    }
    const auto grid = grid_from(ctx.cfg);
    const auto part = partition_from(ctx.cfg, grid, 1);
    ens.members = parallel_jobs<DissipativeRecord>(eps.size(), ctx.threads, [&](std::size_t i) {
      const auto model = model_from(ctx.cfg, eps[i]);
      auto rec = make_record(solve_with(ctx, eos, grid, model), eos, part.block, part.mode,
                             describe_run(model, grid) + ", Rp offset " + CsvWriter::number(offsets[i]));
      if (offsets[i] < 0.0) throw DomainError("rp_offsets must be non-negative");
      for (auto& d : rec.defects) {
        for (auto& r : d.Rp) r += offsets[i];
      }
      return rec;
    });
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
      ctx.manifest.add_outputs(write_record(ctx.out / ("member_" + std::to_string(i)), ens.members[i]));
    }
  }
  if (ens.members.empty()) throw DomainError("select needs at least one ensemble member");

  const auto sel = select_admissible(ens, eos);
  CsvWriter table({"member", "functional", "verdict"});
  nlohmann::json cert = nlohmann::json::array();
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    std::string verdict = "winner";
    for (const auto& c : sel.certificate) {
      if (c.member == i) verdict = to_string(c.verdict);
    }
    table.row({std::to_string(i), CsvWriter::number(sel.functionals[i]), verdict});
    if (i != sel.winner) cert.push_back({{"member", i}, {"verdict", verdict}});
  }
  table.write(ctx.out / "selection.csv");
  ctx.manifest.add_output(ctx.out / "selection.csv");

  ctx.manifest.verdict("winner", sel.winner);
  ctx.manifest.verdict("certificate", cert);
  ctx.manifest.verdict("minimal", pass_fail(sel.minimal));
  ctx.log << "select: winner " << sel.winner << " of " << ens.members.size() << ", " << pass_fail(sel.minimal)
          << '\n';
  return sel.minimal ? kExitOk : kExitVerificationFailed;
}

/// Checkerboard sequence diagnostics, plus the patchwork construction when
/// a [patchwork] section is present.
int cmd_oscillate(Context& ctx) {
  const auto eos = eos_from(ctx.cfg);
  const Config& c = ctx.cfg;
  const TorusGrid grid(positive_int(c, "oscillation", "dim", 1), positive_int(c, "oscillation", "cells", 512));
  const bool shrinking = c.get_bool("oscillation", "shrinking", false);
  const auto seq = checkerboard_sequence(c.get_double("oscillation", "rho_bar", 1.0),
                                         c.get_double("oscillation", "delta", 0.5),
                                         positive_int(c, "oscillation", "levels", 7), grid, shrinking);
  const auto ws = weakstar_diagnostics(seq, polynomial_tests(grid, positive_int(c, "oscillation", "degree", 3)));
  const auto sep = l1_separation(seq);

  const auto members = ensure_dir(ctx.out / "sequence");
  write_field(members / "target.del", seq.target);
  ctx.manifest.add_output(members / "target.del");
  for (std::size_t n = 0; n < seq.members.size(); ++n) {
    const auto p = members / ("member_" + std::to_string(n) + ".del");
    write_field(p, seq.members[n]);
    ctx.manifest.add_output(p);
  }
  CsvWriter wt({"level", "id", "rho_pairing", "rho_difference", "mom_pairing", "bound"});
  for (const auto& r : ws.rows) {
    wt.row({std::to_string(r.level), r.id, CsvWriter::number(r.rho_pairing), CsvWriter::number(r.rho_difference),
            CsvWriter::number(r.mom_pairing), CsvWriter::number(r.bound)});
  }
  wt.write(ctx.out / "weakstar.csv");
  CsvWriter st({"level", "l1_distance", "period"});
  for (std::size_t n = 0; n < sep.distances.size(); ++n) {
    st.row(std::vector<double>{static_cast<double>(n), sep.distances[n], seq.periods[n]});
  }
  st.write(ctx.out / "separation.csv");
  ctx.manifest.add_output(ctx.out / "weakstar.csv");
  ctx.manifest.add_output(ctx.out / "separation.csv");

  // A shrinking amplitude converges strongly; a fixed one must stay separated.
  const bool sep_ok = sep.separated != shrinking;
  bool ok = ws.pass() && sep_ok;
  ctx.manifest.verdict("weak_star", pass_fail(ws.pass()));
  ctx.manifest.verdict("worst_ratio", ws.worst_ratio);
  ctx.manifest.verdict("l1_separation", pass_fail(sep_ok));
  ctx.manifest.verdict("l1_estimate", sep.estimate);

  if (c.has_section("patchwork")) {
    const TorusGrid pg(positive_int(c, "patchwork", "dim", 2), positive_int(c, "patchwork", "cells", 32));
    const int level = static_cast<int>(c.get_int("patchwork", "level", 1));
    const std::size_t nb = static_cast<std::size_t>(1) << (level * pg.dim);
    auto rho = c.get_doubles("patchwork", "rho", std::vector<double>{1.0});
    std::vector<double> all(nb);
    for (std::size_t b = 0; b < nb; ++b) all[b] = rho[b % rho.size()];
    const double period = c.get_double("patchwork", "period", 1.0);
    const auto spec = PatchSpec::dyadic(pg, level, all, period, c.get_double("patchwork", "lambda", 10.0));
    spec.validate(eos);
    const auto steps = static_cast<std::size_t>(positive_int(c, "patchwork", "steps", 16));
    const double amp = c.get_double("patchwork", "amplitude", 0.05);
    std::vector<BlockHistory> hist;
    for (const auto& b : spec.blocks) {
      hist.push_back(pg.dim == 2 ? divergence_free_bump(pg, b, steps, amp) : BlockHistory::zero(b, steps));
    }
    const double horizon = period * positive_int(c, "patchwork", "periods", 2);
    const auto traj = patchwork_assemble(spec, eos, hist, horizon);
    ctx.manifest.add_outputs(write_trajectory(ensure_dir(ctx.out / "patchwork"), traj));

    double periodic_gap = 0.0, trace_worst = 0.0;
    for (std::size_t k = 0; k + steps < traj.size(); ++k) {
      for (std::size_t q = 0; q < traj[k].size(); ++q) {
        for (int a = 0; a < 2; ++a) {
          periodic_gap = std::max(periodic_gap, std::abs(traj[k + steps].mom[q][a] - traj[k].mom[q][a]));
        }
      }
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
      for (std::size_t q = 0; q < traj[k].size(); ++q) {
        const Sym2 t = tracefree_flux(traj[k].rho[q], traj[k].mom[q], pg.dim);
        const double scale = std::max({1.0, std::abs(t.xx), std::abs(t.xy), std::abs(t.yy)});
        trace_worst = std::max(trace_worst, std::abs(t.trace()) / scale);
      }
    }
    CsvWriter bt({"block", "rho", "kinetic_momentum", "divergence_residual", "momentum_residual"});
    for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
      const auto nf = noflux_weak_residual(hist[b], all[b], period, BlockPolynomialBank(pg, spec.blocks[b]));
      bt.row(std::vector<double>{static_cast<double>(b), all[b],
                                 kinetic_constraint_momentum(all[b], spec.lambda, eos, pg.dim),
                                 nf.divergence.max_abs, nf.momentum.max_abs});
    }
    bt.write(ctx.out / "patchwork_blocks.csv");
    ctx.manifest.add_output(ctx.out / "patchwork_blocks.csv");
    const bool p_ok = periodic_gap == 0.0;
    const bool t_ok = trace_worst <= 1e-14;
    ctx.manifest.verdict("patchwork_periodic", pass_fail(p_ok));
    ctx.manifest.verdict("patchwork_tracefree", pass_fail(t_ok));
    ctx.manifest.verdict("patchwork_trace_max", trace_worst);
    ok = ok && p_ok && t_ok;
  }
  ctx.log << "oscillate: worst ratio " << ws.worst_ratio << ", l1 estimate " << sep.estimate << ", "
          << pass_fail(ok) << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

const Config::Schema& config_schema() {
  static const Config::Schema schema{
      {"run", {"seed"}},
      {"eos", {"a", "gamma"}},
      {"grid", {"dim", "cells"}},
      {"initial", {"kind", "rho", "mx", "my", "rho_left", "u_left", "rho_right", "u_right", "x0", "amplitude"}},
      {"solver",
       {"epsilon", "shear_mu", "bulk_eta", "cfl", "end_time", "output_stride", "flux", "scheme", "dt_min",
        "density_floor"}},
      {"defects", {"block", "mode"}},
      {"bank", {"max_mode", "envelopes", "horizon"}},
      {"verify", {"record", "tolerance"}},
      {"sweep", {"epsilons", "cells", "coarse_cells", "time", "reference"}},
      {"select", {"epsilons", "rp_offsets", "records"}},
      {"oscillation", {"dim", "cells", "rho_bar", "delta", "levels", "degree", "shrinking"}},
      {"patchwork", {"dim", "cells", "level", "rho", "period", "lambda", "steps", "amplitude", "periods"}},
  };
  return schema;
}

fs::path resolve_output(const CliOptions& options) {
  if (!options.out.empty()) return options.out;
  if (const char* env = std::getenv("DEL_OUT_DIR"); env && *env) return fs::path(env) / options.command;
  return fs::path("dlab_out") / options.command;
}

int cli_run(const CliOptions& options, std::ostream& log) {
  static const std::map<std::string, int (*)(Context&)> commands{
      {"solve", cmd_solve},     {"sweep", cmd_sweep},         {"defects", cmd_defects},
      {"verify", cmd_verify},   {"oscillate", cmd_oscillate}, {"select", cmd_select},
  };
  try {
    const auto it = commands.find(options.command);
    if (it == commands.end()) throw Error("unknown command '" + options.command + "'");
    if (options.threads < 1) throw DomainError("--threads must be at least 1");
    if (!fs::exists(options.config)) throw IoError("config file not found: " + options.config.string());
    const Config cfg = Config::load(options.config);
    cfg.require_known(config_schema());

    const auto out = resolve_output(options);
    fs::create_directories(out);
    RunManifest manifest(options.command, out);
    manifest.set_config(cfg.to_json(), options.config.string());
    manifest.add_input(options.config);
    const std::uint64_t seed = options.seed ? *options.seed : cfg.get_u64("run", "seed", 0);
    manifest.set_seed(seed);
    manifest.set_threads(options.threads);

    Context ctx{cfg, out, options.threads, seed, log, manifest};
    const int status = it->second(ctx);
    manifest.verdict("exit_status", status);
    const auto path = manifest.write();
    log << "manifest: " << path.string() << '\n';
    return status;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace dlab
