// Acceptance run: one PASS/FAIL line per criterion at full scale.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "dlab/dissipative_analysis.hpp"
#include "dlab/oscillation_lab.hpp"
#include "dlab/scenarios.hpp"
#include "dlab/selection.hpp"
#include "dlab/weak_form.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const EosParams kEos{};

RunResult solve(const ConservedField& init, double eps, double T, double stride,
                const EosParams& eos = kEos) {
  SolverConfig cfg;
  cfg.end_time = T;
  cfg.output_stride = stride;
  return run(init, eos, ViscosityModel{eps, 1.0, 1.0}, cfg);
}

Outcome eos_algebra() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> logr(-3.0, 3.0), ga(1.05, 3.0), aa(0.1, 10.0), u(-2.0, 2.0), l(0.0, 1.0);
  double worst_identity = 0.0;
  double worst_convexity = -kInfinity;
  for (int s = 0; s < 10000; ++s) {
    const EosParams eos{aa(rng), ga(rng)};
    const double rho = std::pow(10.0, logr(rng));
    const double lhs = pressure_potential_derivative(rho, eos) * rho - pressure_potential(rho, eos);
    const double p = oracle::p(rho, eos.a, eos.gamma);
    worst_identity = std::max(worst_identity, std::abs(lhs - p) / p);

    const double r1 = std::pow(10.0, logr(rng)), r2 = std::pow(10.0, logr(rng));
    const Vec2 m1{u(rng) * r1, u(rng) * r1}, m2{u(rng) * r2, u(rng) * r2};
    const double lam = l(rng);
    const double e1 = total_energy_density(r1, m1, eos), e2 = total_energy_density(r2, m2, eos);
    const double mid = total_energy_density(lam * r1 + (1 - lam) * r2, lam * m1 + (1 - lam) * m2, eos);
    const double chord = lam * e1 + (1 - lam) * e2;
    worst_convexity = std::max(worst_convexity, (mid - chord) / std::max(1.0, chord));
  }
  return {worst_identity <= 1e-12 && worst_convexity <= 1e-12,
          fmt("max rel identity error %.2e, max convexity excess %.2e (10000 samples)", worst_identity,
              worst_convexity)};
}

Outcome discrete_energy_inequality() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> le(-3.0, -1.0), amp(0.05, 0.4);
  double worst = -kInfinity;
  bool monotone = true;
  for (int k = 0; k < 10; ++k) {
    const TorusGrid g(k % 2 == 0 ? 1 : 2, k % 2 == 0 ? 128 : 32);
    const auto res = solve(random_smooth(g, 1000 + k, amp(rng)), std::pow(10.0, le(rng)), 0.2, 0.05);
    worst = std::max(worst, std::max(0.0, -res.ledger.min_slack()) / res.ledger.initial_energy());
    monotone = monotone && res.ledger.dissipation_monotone();
  }
  return {worst <= 1e-6 && monotone,
          fmt("worst -slack/E(0) %.2e over 10 runs, dissipation monotone %s", worst, monotone ? "yes" : "no")};
}

Outcome fenchel() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.1, 5.0);
  double worst = 0.0, largest_mismatch_gap = -kInfinity;
  for (int s = 0; s < 1000; ++s) {
    const int dim = s % 2 == 0 ? 1 : 2;
    const ViscosityModel model{1.0, pos(rng), pos(rng)};
    auto random_grad = [&] {
      Mat2 G{{{u(rng), dim == 2 ? u(rng) : 0.0}, {dim == 2 ? u(rng) : 0.0, dim == 2 ? u(rng) : 0.0}}};
      return G;
    };
    const Mat2 G = random_grad();
    const Sym2 D = Sym2::sym_part(G);
    const Sym2 S = viscous_stress(G, model, dim);
    const auto t = fenchel_decomposition(D, S, model, dim);
    worst = std::max(worst, std::abs(t.gap) / std::max(1.0, std::abs(S.contract(D))));
    const Sym2 S2 = viscous_stress(random_grad(), model, dim);
    largest_mismatch_gap = std::max(largest_mismatch_gap, fenchel_decomposition(D, S2, model, dim).gap);
  }
  return {worst <= 1e-12 && largest_mismatch_gap < 0.0,
          fmt("max |gap| at S(D) %.2e, largest mismatched gap %.2e (1000 samples)", worst, largest_mismatch_gap)};
}

ConservedField rough_field(const TorusGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.05, 3.0), m(-2.0, 2.0);
  ConservedField f(g);
  for (std::size_t c = 0; c < f.size(); ++c) {
    f.rho[c] = r(rng);
    f.mom[c] = {m(rng), g.dim == 2 ? m(rng) : 0.0};
  }
  return f;
}

Outcome defect_positivity() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int dim = s % 2 == 0 ? 1 : 2;
    const TorusGrid g(dim, dim == 1 ? 64 : 16);
    const int H = 1 << (1 + s % 3);
    const auto mode = s % 4 < 2 ? AveragingMode::Block : AveragingMode::Window;
    const auto d = defect_field(rough_field(g, rng), BlockPartition(g, H, mode), kEos);
    double scale = 1.0;
    for (std::size_t c = 0; c < d.size(); ++c) {
      scale = std::max({scale, std::abs(d.Rv[c].xx), std::abs(d.Rv[c].xy), std::abs(d.Rv[c].yy), d.Rp[c]});
    }
    for (int k = 0; k < 100; ++k) {
      Vec2 xi{n01(rng), dim == 2 ? n01(rng) : 0.0};
      const double len = std::sqrt(norm2(xi));
      xi = (1.0 / len) * xi;
      for (std::size_t c = 0; c < d.size(); ++c) worst = std::max(worst, -d.Rv[c].quadratic_form(xi) / scale);
    }
    for (std::size_t c = 0; c < d.size(); ++c) worst = std::max(worst, -d.Rp[c] / scale);
  }
  return {worst <= 1e-12, fmt("worst negative part %.2e of scale (1000 fields x 100 directions)", worst)};
}

Outcome bookkeeping() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const int dim = s % 2 == 0 ? 1 : 2;
    const TorusGrid g(dim, dim == 1 ? 256 : 32);
    const auto f = s % 3 == 0 ? random_smooth(g, 5000 + s, 0.5) : rough_field(g, rng);
    const int H = 1 << (1 + s % 4);
    worst = std::max(worst, energy_bookkeeping(f, BlockPartition(g, H), kEos).max_relative);
  }
  return {worst <= 1e-11, fmt("max relative residual %.2e (200 fields)", worst)};
}

Outcome compatibility() {
  const TorusGrid g(1, 256);
  const auto res = solve(acoustic_pulse(g, 5e-3, kEos), 1e-2, 0.2, 0.05);
  const auto rec = make_record(res, kEos, 4);
  const auto rep = compatibility_check(rec, kEos);
  std::vector<double> mass;
  std::string masses;
  for (int H : {32, 16, 8, 4}) {
    mass.push_back(make_record(res, kEos, H).defect_mass(kEos));
    masses += fmt(" H=%d:%.2e", H, mass.back());
  }
  double order = kInfinity;
  for (std::size_t k = 1; k < mass.size(); ++k) order = std::min(order, std::log2(mass[k - 1] / mass[k]));
  const bool ok = rep.verdict == Verdict::Classical && rep.defect_mass <= 1e-6 * rep.initial_energy && order >= 1.7;
  return {ok, fmt("verdict %s, defect mass/E(0) %.2e, min observed order %.2f;", to_string(rep.verdict),
                  rep.defect_mass / rep.initial_energy, order) +
                  masses};
}

Outcome defect_compensation() {
  const double T = 0.2;
  const TorusGrid g(1, 512);
  const auto res = solve(riemann_1d(g, {1.0, 2.0}, {1.0, -2.0}, 0.125), 1e-3, T, 0.0025);
  const BlockPartition win(g, 128, AveragingMode::Window);
  Trajectory coarse;
  for (const auto& s : res.trajectory.snapshots()) coarse.push_back(coarse_grain(s, win));
  const auto defects = defect_history(res.trajectory, win, kEos);
  const TestFunctionBank bank(1, T, 3, 2);
  const auto without = momentum_residual(coarse, bank, T, kEos);
  const auto with = momentum_residual(coarse, bank, T, kEos, &defects);
  double worst = 0.0;
  std::string worst_id;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < with.entries.size(); ++i) {
    // Constant modes have zero gradient: the pairing is 0 on both sides.
    if (with.entries[i].constant) continue;
    ++checked;
    const double r = std::abs(with.entries[i].residual) / std::abs(without.entries[i].residual);
    if (r > worst) {
      worst = r;
      worst_id = with.entries[i].id;
    }
  }
  return {worst <= 0.1 && checked > 0,
          fmt("worst with/without ratio %.3f at %s over %zu bank functions", worst, worst_id.c_str(), checked)};
}

Outcome consistency() {
  const std::vector<std::pair<double, int>> sweep{{1e-1, 64}, {5e-2, 128}, {2.5e-2, 256}};
  std::vector<SequenceMember> members;
  for (const auto& [eps, n] : sweep) {
    members.push_back({eps, solve(riemann_1d(TorusGrid(1, n), {1.0, 0.0}, {0.5, 0.0}), eps, 0.2, 0.01).trajectory});
  }
  const auto t = consistency_sweep(members, TestFunctionBank(1, 0.2), kEos);
  const bool ok = t.e1_monotone && t.e2_monotone && t.e3_monotone && t.c_bounds_all;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  return {ok, fmt("monotone E1 %s, E2 %s, E3 %s; c = %.3e bounds all members %s", yn(t.e1_monotone),
                  yn(t.e2_monotone), yn(t.e3_monotone), t.c_bound, yn(t.c_bounds_all))};
}

Outcome weak_strong() {
  const double T = 0.1, stride = 0.01;
  const TorusGrid g(1, 512);
  const auto ref = solve(smooth_wave(g, 0.2), 0.0, T, stride);
  std::vector<double> gaps;
  for (double eps : {1e-1, 5e-2, 2.5e-2}) {
    const auto rec = make_record(solve(smooth_wave(g, 0.2), eps, T, stride), kEos);
    gaps.push_back(weak_strong_gap(rec, ref.trajectory, kEos).gap.back());
  }
  const bool decreasing = gaps[1] < gaps[0] && gaps[2] < gaps[1];

  GapOptions relaxed;
  relaxed.require_initial_match = false;
  std::vector<double> lambdas;
  for (double delta : {1e-2, 1e-3}) {
    auto init = smooth_wave(g, 0.2);
    for (std::size_t c = 0; c < init.size(); ++c) init.rho[c] += delta * std::cos(std::numbers::pi * g.center(c)[0]);
    const auto rec = make_record(solve(init, 0.0, T, stride), kEos);
    lambdas.push_back(weak_strong_gap(rec, ref.trajectory, kEos, relaxed).lambda);
  }
  const bool finite = std::isfinite(lambdas[0]) && std::isfinite(lambdas[1]);
  // A decaying gap gives a negative rate; stability compares magnitudes of equal sign.
  const double lo = std::min(std::abs(lambdas[0]), std::abs(lambdas[1]));
  const double hi = std::max(std::abs(lambdas[0]), std::abs(lambdas[1]));
  const bool stable = finite && (lambdas[0] > 0.0) == (lambdas[1] > 0.0) && hi < 2.0 * lo;
  return {decreasing && stable, fmt("gap(0.1) = %.3e, %.3e, %.3e; Lambda(1e-2) = %.4f, Lambda(1e-3) = %.4f", gaps[0],
                                    gaps[1], gaps[2], lambdas[0], lambdas[1])};
}

Outcome oscillation() {
  const TorusGrid g(1, 512);
  const double delta = 0.5;
  const auto seq = checkerboard_sequence(1.0, delta, 7, g);
  const auto ws = weakstar_diagnostics(seq, polynomial_tests(g, 3));
  const auto sep = l1_separation(seq);
  // Independent L1 distance per member.
  double l1_err = 0.0;
  for (const auto& m : seq.members) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.size(); ++c) s += std::abs(m.rho[c] - seq.target.rho[c]);
    l1_err = std::max(l1_err, std::abs(s * g.cell_volume() - delta * g.domain_volume()));
  }
  const bool ok = ws.pass() && ws.worst_ratio <= 0.6 && l1_err == 0.0 && sep.separated;
  return {ok, fmt("worst ratio %.3f for n = 1..6, max |L1 - delta|Omega|| = %.1e", ws.worst_ratio, l1_err)};
}

Outcome patchwork() {
  const TorusGrid g(2, 32);
  const auto spec = PatchSpec::dyadic(g, 1, {1.0, 2.0, 0.5, 1.5}, 0.5, 10.0);
  std::vector<BlockHistory> hist;
  const std::size_t M = 16;
  for (const auto& b : spec.blocks) hist.push_back(divergence_free_bump(g, b, M, 0.05));
  const auto traj = patchwork_assemble(spec, kEos, hist, 3 * spec.period);
  bool periodic = traj.size() == 3 * M + 1;
  for (std::size_t k = 0; k + M < traj.size(); ++k) {
    periodic = periodic && traj[k + M].mom == traj[k].mom && traj[k + M].rho == traj[k].rho;
  }

  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> r(0.01, 10.0), m(-10.0, 10.0), lam(0.0, 50.0), ga(1.05, 3.0);
  double trace = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const Sym2 t = tracefree_flux(r(rng), {m(rng), m(rng)}, 2);
    trace = std::max(trace, std::abs(t.trace()) / std::max({1.0, std::abs(t.xx), std::abs(t.yy)}));
  }
  double kin = 0.0;
  for (int s = 0; s < 100; ++s) {
    const EosParams eos{1.0, ga(rng)};
    const int dim = 1 + s % 2;
    const double rho = r(rng);
    const double L = oracle::p(rho, eos.a, eos.gamma) * dim / 2.0 + lam(rng);
    const double closed = std::sqrt(2.0 * rho * (L - oracle::p(rho, eos.a, eos.gamma) * dim / 2.0));
    kin = std::max(kin, std::abs(kinetic_constraint_momentum(rho, L, eos, dim) - closed) / std::max(1.0, closed));
  }
  return {periodic && trace <= 1e-14 && kin <= 1e-14,
          fmt("bitwise periodic %s, max trace %.1e, kinetic constraint max rel error %.1e", periodic ? "yes" : "no",
              trace, kin)};
}

/// Independent per-cell total energy density of snapshot k.
std::vector<double> oracle_density(const DissipativeRecord& r, std::size_t k) {
  const auto& f = r.trajectory[k];
  const auto& d = r.defects[k];
  std::vector<double> e(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double kin = 0.5 * (f.mom[c][0] * f.mom[c][0] + f.mom[c][1] * f.mom[c][1]) / f.rho[c];
    e[c] = kin + oracle::P(f.rho[c], kEos.a, kEos.gamma) + 0.5 * (d.Rv[c].xx + d.Rv[c].yy) + d.Rp[c] / (kEos.gamma - 1);
  }
  return e;
}

bool oracle_le(const DissipativeRecord& a, const DissipativeRecord& b, double tol) {
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const auto ea = oracle_density(a, k), eb = oracle_density(b, k);
    for (std::size_t c = 0; c < ea.size(); ++c) {
      if (ea[c] > eb[c] + tol) return false;
    }
  }
  return true;
}

double oracle_integral(const DissipativeRecord& r) {
  double s = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    double cur = 0.0;
    for (double v : oracle_density(r, k)) cur += v;
    cur *= r.grid().cell_volume();
    if (k > 0) s += 0.5 * (r.trajectory[k].time - r.trajectory[k - 1].time) * (cur + prev);
    prev = cur;
  }
  return s;
}

Outcome selection() {
  const TorusGrid g(1, 128);
  std::vector<DissipativeRecord> base;
  for (double eps : {4e-2, 2e-2, 1e-2, 5e-3}) {
    base.push_back(make_record(solve(riemann_1d(g, {1.0, 0.0}, {0.5, 0.0}), eps, 0.1, 0.025), kEos, 4));
  }
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto bumped = [&](DissipativeRecord r, double size) {
    // Time-independent bumps keep the energy inequality intact.
    std::vector<double> bump(r.defects.front().size());
    for (auto& b : bump) b = u(rng) < 0.3 ? size * u(rng) : 0.0;
    bump[rng() % bump.size()] = size;
    for (auto& d : r.defects) {
      for (std::size_t c = 0; c < bump.size(); ++c) d.Rp[c] += bump[c];
    }
    return r;
  };

  int dominance_ok = 0, dominance_trials = 0, oracle_ok = 0, oracle_trials = 0;
  for (std::size_t size = 2; size <= 8; ++size) {
    for (int trial = 0; trial < 5; ++trial) {
      // Known dominance: one clean member, all others bumped copies of it.
      Ensemble known;
      const std::size_t clean = rng() % size;
      const auto& root = base[rng() % base.size()];
      for (std::size_t i = 0; i < size; ++i) known.members.push_back(i == clean ? root : bumped(root, 0.05));
      ++dominance_trials;
      dominance_ok += select_admissible(known, kEos).winner == clean;

      // Mixed ensemble: exhaustive pairwise oracle.
      Ensemble mixed;
      for (std::size_t i = 0; i < size; ++i) {
        const auto& r = base[rng() % base.size()];
        mixed.members.push_back(u(rng) < 0.5 ? r : bumped(r, 0.02 * u(rng)));
      }
      const auto sel = select_admissible(mixed, kEos);
      std::size_t best = 0;
      std::vector<double> f;
      for (const auto& m : mixed.members) f.push_back(oracle_integral(m));
      for (std::size_t i = 1; i < size; ++i) {
        if (f[i] < f[best] * (1.0 - 1e-13)) best = i;
      }
      const double tol = 1e-10 * mixed.members.front().ledger.initial_energy();
      bool never_beaten = true;
      for (std::size_t i = 0; i < size; ++i) {
        const auto& w = mixed.members[sel.winner];
        if (i != sel.winner && oracle_le(mixed.members[i], w, tol) && !oracle_le(w, mixed.members[i], tol)) {
          never_beaten = false;
        }
      }
      ++oracle_trials;
      oracle_ok += std::abs(f[sel.winner] - f[best]) <= 1e-12 * f[best] && never_beaten && sel.minimal;
    }
  }

  int convex_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& a = base[rng() % base.size()];
    const auto& b = base[rng() % base.size()];
    const auto c = convex_combine(a, b, u(rng), kEos);
    bool ok = audit_record(c, kEos).ok();
    for (const auto& d : c.defects) ok = ok && d.satisfies_invariants();
    convex_ok += ok;
  }
  return {dominance_ok == dominance_trials && oracle_ok == oracle_trials && convex_ok == 100,
          fmt("known dominance %d/%d, pairwise oracle %d/%d (sizes 2..8), convex combinations %d/100",
              dominance_ok, dominance_trials, oracle_ok, oracle_trials, convex_ok)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"eos energy algebra", eos_algebra},
      {"discrete energy inequality", discrete_energy_inequality},
      {"fenchel identity", fenchel},
      {"defect positivity", defect_positivity},
      {"energy bookkeeping", bookkeeping},
      {"compatibility", compatibility},
      {"defect compensation", defect_compensation},
      {"consistency sweep", consistency},
      {"weak-strong gap", weak_strong},
      {"oscillation diagnostics", oscillation},
      {"patchwork verification", patchwork},
      {"selection", selection},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("criterion %2zu %-28s %s  %s  [%.1fs]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
