#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dlab/scenarios.hpp"
#include "dlab/weak_form.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

Trajectory steady(const TorusGrid& g, double T, int count) {
  Trajectory t;
  for (int k = 0; k <= count; ++k) {
    auto f = constant_state(g, 1.3, {0.4, g.dim == 2 ? -0.1 : 0.0});
    f.time = T * k / count;
    t.push_back(f);
  }
  return t;
}

RunResult viscous(const ConservedField& init, double eps, double T, double stride) {
  SolverConfig cfg;
  cfg.end_time = T;
  cfg.output_stride = stride;
  return run(init, EosParams{}, ViscosityModel{eps, 1.0, 1.0}, cfg);
}

Trajectory simple_wave(int n, double T, double stride, double amp) {
  const oracle::SimpleWave w{amp, 1.0, 1.4};
  const TorusGrid g(1, n);
  Trajectory traj;
  const int steps = static_cast<int>(std::lround(T / stride));
  for (int k = 0; k <= steps; ++k) {
    ConservedField f(g, k * stride);
    for (int i = 0; i < n; ++i) {
      const auto s = w.cell_average(-1.0 + i * g.spacing(), g.spacing(), f.time);
      f.rho[static_cast<std::size_t>(i)] = s[0];
      f.mom[static_cast<std::size_t>(i)] = {s[1], 0.0};
    }
    traj.push_back(f);
  }
  return traj;
}

}  // namespace

TEST_CASE("bank layout") {
  const TestFunctionBank b1(1, 1.0);
  CHECK(b1.modes().size() == 7);
  CHECK(b1.scalar_count() == 14);
  CHECK(b1.vector_count() == 14);
  const TestFunctionBank b2(2, 1.0);
  CHECK(b2.modes().size() == 49);
  CHECK(b2.vector_count() == 196);
  for (const auto& e : b2.envelopes()) {
    CHECK(e.value(0.0) == doctest::Approx(1.0));
    CHECK(e.value(1.0) == 0.0);
    CHECK(e.derivative(1.0) == 0.0);
  }
  CHECK_THROWS_AS(TestFunctionBank(3, 1.0), DomainError);
  CHECK_THROWS_AS(b1.scalar_test(0, TorusGrid(2, 4)), IncompatibleError);
}

TEST_CASE("bank derivatives are exact") {
  const TestFunctionBank b(2, 0.5);
  const double d = 1e-6;
  for (std::size_t i = 0; i < b.scalar_count(); i += 5) {
    const Vec2 x{0.31, -0.47};
    const double t = 0.2;
    const Vec2 g = b.gradient(i, x, t);
    CHECK(g[0] == doctest::Approx((b.value(i, {x[0] + d, x[1]}, t) - b.value(i, {x[0] - d, x[1]}, t)) /
                                  (2 * d)).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx((b.value(i, {x[0], x[1] + d}, t) - b.value(i, {x[0], x[1] - d}, t)) /
                                  (2 * d)).epsilon(1e-6));
    CHECK(b.time_derivative(i, x, t) ==
          doctest::Approx((b.value(i, x, t + d) - b.value(i, x, t - d)) / (2 * d)).epsilon(1e-6));
  }
  // Cell integrals against the closed-form oracle.
  const TorusGrid g(2, 8);
  const auto ct = b.scalar_test(17, g);
  const auto& m = b.modes()[17 / b.envelopes().size()];
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto ij = g.coords(c);
    const double lx = -1 + ij[0] * g.spacing(), ly = -1 + ij[1] * g.spacing();
    CHECK(ct.phi[c] == doctest::Approx(oracle::trig_integral(m.kx, m.sine_x, lx, lx + g.spacing()) *
                                       oracle::trig_integral(m.ky, m.sine_y, ly, ly + g.spacing())));
  }
}

TEST_CASE("constant states have residuals at the floor") {
  for (int dim : {1, 2}) {
    const TorusGrid g(dim, 16);
    const auto traj = steady(g, 0.5, 10);
    const TestFunctionBank bank(dim, 0.5);
    CHECK(continuity_residual(traj, bank, 0.5).max_abs <= 1e-10);
    CHECK(momentum_residual(traj, bank, 0.5, EosParams{}).max_abs <= 1e-10);
    CHECK(continuity_residual(traj, bank, 0.25).max_abs <= 1e-10);
  }
  CHECK_THROWS_AS(continuity_residual(steady(TorusGrid(1, 8), 0.5, 10), TestFunctionBank(1, 0.5), 0.33),
                  DomainError);
}

TEST_CASE("mass test function sees exact conservation") {
  const auto res = viscous(random_smooth(TorusGrid(1, 64), 3), 1e-2, 0.2, 0.02);
  const TestFunctionBank bank(1, 0.2);
  const auto rep = continuity_residual(res.trajectory, bank, 0.2);
  for (const auto& e : rep.entries) {
    if (e.constant) CHECK(std::abs(e.residual) <= 1e-12 * res.trajectory.front().total_mass());
  }
  CHECK(rep.snapshot_spacing == doctest::Approx(0.02));
}

TEST_CASE("continuity residual shrinks under refinement") {
  const TestFunctionBank bank(1, 0.2);
  std::vector<double> r;
  for (int n : {64, 128, 256}) {
    const auto res = viscous(smooth_wave(TorusGrid(1, n), 0.2), 1e-2, 0.2, 0.01);
    r.push_back(continuity_residual(res.trajectory, bank, 0.2).max_abs);
  }
  CHECK(r[1] < r[0]);
  CHECK(r[2] < r[1]);
}

TEST_CASE("residuals are linear in the test function") {
  const auto res = viscous(random_smooth(TorusGrid(2, 16), 4), 2e-2, 0.1, 0.02);
  const TestFunctionBank bank(2, 0.1);
  const auto& g = res.trajectory.grid();
  const auto eos = EosParams{};
  const auto a = bank.scalar_test(6, g), b = bank.scalar_test(20, g);
  auto sum = a;
  sum += b;
  CHECK(continuity_residual(res.trajectory, sum, 0.1) ==
        doctest::Approx(continuity_residual(res.trajectory, a, 0.1) +
                        continuity_residual(res.trajectory, b, 0.1)).epsilon(1e-12));
  auto va = bank.vector_test(13, g), vb = bank.vector_test(41, g);
  auto vs = va;
  vs *= 2.5;
  vs += vb;
  CHECK(momentum_residual(res.trajectory, vs, 0.1, eos) ==
        doctest::Approx(2.5 * momentum_residual(res.trajectory, va, 0.1, eos) +
                        momentum_residual(res.trajectory, vb, 0.1, eos)).epsilon(1e-12));
  CHECK_THROWS_AS(va += bank.vector_test(14, g), IncompatibleError);
}

TEST_CASE("exact simple wave residuals sit within the quadrature budget") {
  const double T = 0.4;
  const auto traj = simple_wave(512, T, 0.02, 0.1);
  const TestFunctionBank bank(1, T);
  for (const auto& rep : {continuity_residual(traj, bank, T), momentum_residual(traj, bank, T, EosParams{})}) {
    for (const auto& e : rep.entries) {
      CAPTURE(e.id);
      CHECK(std::abs(e.residual) <= 10.0 * e.quadrature_estimate + 1e-10);
    }
  }
}

TEST_CASE("viscous run: momentum residual approaches the viscous pairing") {
  // The residual is the viscous pairing plus the flux's own numerical
  // viscosity, which is O(h); the mismatch must shrink with the grid.
  const double T = 0.2, eps = 1e-2;
  const TestFunctionBank bank(1, T);
  std::vector<double> mismatch, scale;
  for (int n : {256, 1024}) {
    const auto res = viscous(smooth_wave(TorusGrid(1, n), 0.2), eps, T, 0.005);
    const auto mom = momentum_residual(res.trajectory, bank, T, EosParams{});
    const auto vis = viscous_pairing(res.trajectory, bank, T, ViscosityModel{eps, 1.0, 1.0});
    double worst = 0.0;
    for (std::size_t i = 0; i < mom.entries.size(); ++i) {
      worst = std::max(worst, std::abs(mom.entries[i].residual + vis.entries[i].residual));
    }
    mismatch.push_back(worst);
    scale.push_back(vis.max_abs);
    MESSAGE("N = " << n << ": max |R + V| = " << worst << ", max |V| = " << vis.max_abs);
  }
  CHECK(mismatch[1] < 0.5 * mismatch[0]);
  CHECK(mismatch[1] <= 0.15 * scale[1]);
}

TEST_CASE("energy inequality check") {
  const TorusGrid g(1, 32);
  const auto st = steady(g, 0.5, 10);
  const TestFunctionBank bank(1, 0.5);
  const auto flat = energy_inequality_check(st, ledger_from_snapshots(st, EosParams{}), bank, EosParams{});
  CHECK(flat.pass);
  CHECK(std::abs(flat.min_slack) <= 1e-12);

  const auto res = viscous(acoustic_pulse(TorusGrid(1, 128), 0.1, EosParams{}), 1e-2, 0.3, 0.03);
  const TestFunctionBank b3(1, 0.3);
  const auto rep = energy_inequality_check(res.trajectory, res.ledger, b3, EosParams{});
  CHECK(rep.pass);
  CHECK(rep.envelopes.size() == 3);

  // Inflate the energy of later snapshots.
  Trajectory inflated;
  for (const auto& s : res.trajectory.snapshots()) {
    auto f = s;
    for (auto& m : f.mom) m = (1.0 + 2.0 * f.time) * m;
    inflated.push_back(f);
  }
  CHECK_FALSE(energy_inequality_check(inflated, ledger_from_snapshots(inflated, EosParams{}), b3,
                                      EosParams{})
                  .pass);

  // Adding a positive defect at t = 0 only is also a violation of nothing;
  // adding growing defects is.
  std::vector<DefectField> grow;
  for (const auto& s : res.trajectory.snapshots()) {
    auto d = DefectField::zero(s.grid, s.time);
    for (auto& r : d.Rp) r = s.time;
    grow.push_back(d);
  }
  CHECK_FALSE(energy_inequality_check(res.trajectory, res.ledger, b3, EosParams{}, &grow).pass);
}

TEST_CASE("consistency sweep on an exact sequence stays at the floor") {
  std::vector<SequenceMember> members;
  for (double eps : {1e-1, 5e-2, 2.5e-2}) members.push_back({eps, steady(TorusGrid(1, 32), 0.2, 4)});
  const auto table = consistency_sweep(members, TestFunctionBank(1, 0.2), EosParams{});
  for (const auto& r : table.rows) CHECK(r.value <= 1e-10);
  CHECK(table.e1_monotone);
  CHECK(table.e2_monotone);
  CHECK(table.e3_monotone);
  CHECK(table.c_bounds_all);
  CHECK_THROWS_AS(consistency_sweep({members[0], members[1]}, TestFunctionBank(1, 0.2), EosParams{}),
                  DomainError);
}

TEST_CASE("defect pairing does not increase the coarse residual on a shock") {
  const double T = 0.2;
  const TorusGrid g(1, 256);
  const auto res = viscous(riemann_1d(g, {1.0, 2.0}, {1.0, -2.0}, 0.125), 1e-3, T, 0.005);
  const BlockPartition win(g, 64, AveragingMode::Window);
  Trajectory coarse;
  for (const auto& s : res.trajectory.snapshots()) coarse.push_back(coarse_grain(s, win));
  const auto defects = defect_history(res.trajectory, win, EosParams{});
  const TestFunctionBank bank(1, T);
  const auto without = momentum_residual(coarse, bank, T, EosParams{});
  const auto with = momentum_residual(coarse, bank, T, EosParams{}, &defects);
  CHECK(with.max_abs <= without.max_abs);
  CHECK_THROWS_AS(momentum_residual(res.trajectory, bank, T, EosParams{},
                                    new std::vector<DefectField>(defect_history(
                                        res.trajectory, BlockPartition(g, 4), EosParams{}))),
                  IncompatibleError);
}
