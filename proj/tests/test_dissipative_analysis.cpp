#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "dlab/dissipative_analysis.hpp"
#include "dlab/scenarios.hpp"
#include "dlab/weak_form.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

constexpr double kPi = std::numbers::pi;

RunResult solve(const ConservedField& init, double eps, double T, double stride, double mu = 0.0) {
  SolverConfig cfg;
  cfg.end_time = T;
  cfg.output_stride = stride;
  return run(init, EosParams{}, ViscosityModel{eps, mu, 1.0}, cfg);
}

std::vector<Vec2> sample(const TorusGrid& g, auto fn) {
  std::vector<Vec2> u(g.cell_count());
  for (std::size_t c = 0; c < u.size(); ++c) u[c] = fn(g.center(c));
  return u;
}

/// Brute-force Besov estimate over every axis shift, written independently.
double besov_brute(const std::vector<double>& v, int n, double alpha, double q) {
  const double h = 2.0 / n;
  double sup = 0.0;
  for (int s = 1; s <= n / 2; ++s) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::pow(std::abs(v[(i + s) % n] - v[i]), q) * h;
    sup = std::max(sup, std::pow(acc, 1.0 / q) / std::pow(s * h, alpha));
  }
  return sup;
}

}  // namespace

TEST_CASE("one-sided Lipschitz rate") {
  const TorusGrid g1(1, 256);
  CHECK(one_sided_lipschitz_d(sample(g1, [](Vec2) { return Vec2{0.7, 0.0}; }), g1) == 0.0);
  const double d = one_sided_lipschitz_d(sample(g1, [](Vec2 x) { return Vec2{std::sin(kPi * x[0]), 0.0}; }), g1);
  CHECK(d == doctest::Approx(kPi).epsilon(1e-3));

  const TorusGrid g2(2, 32);
  const auto rot = sample(g2, [](Vec2 x) { return Vec2{-x[1], x[0]}; });
  CHECK(std::abs(one_sided_lipschitz_d(rot, g2, Boundary::Open)) <= 1e-12);

  // Invariance under adding a rigid rotation.
  const auto base = sample(g2, [](Vec2 x) { return Vec2{std::sin(kPi * x[0]) * x[1], x[0] * x[0]}; });
  auto sum = base;
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = sum[c] + 3.0 * rot[c];
  CHECK(one_sided_lipschitz_d(sum, g2, Boundary::Open) ==
        doctest::Approx(one_sided_lipschitz_d(base, g2, Boundary::Open)).epsilon(1e-12));
}

TEST_CASE("records from runs") {
  const auto res = solve(riemann_1d(TorusGrid(1, 128), {1.0, 1.0}, {1.0, -1.0}, 0.13), 1e-2, 0.2, 0.02);
  const auto plain = make_record(res, EosParams{});
  CHECK(plain.defect_mass(EosParams{}) == 0.0);
  CHECK(audit_record(plain, EosParams{}).ok());

  const auto blocked = make_record(res, EosParams{}, 8);
  CHECK(blocked.grid().cells_per_axis == 16);
  CHECK(blocked.defect_mass(EosParams{}) > 0.0);
  for (std::size_t k = 0; k < blocked.trajectory.size(); ++k) {
    const double t = blocked.trajectory[k].time;
    const std::size_t row = static_cast<std::size_t>(
        std::find_if(res.ledger.times.begin(), res.ledger.times.end(),
                     [&](double x) { return std::abs(x - t) < 1e-12; }) -
        res.ledger.times.begin());
    CHECK(blocked.ledger.energy[row] + blocked.defect_energy(k, EosParams{}) ==
          doctest::Approx(res.ledger.energy[row]).epsilon(1e-12));
    CHECK(total_energy(blocked.trajectory[k], EosParams{}) ==
          doctest::Approx(blocked.ledger.energy[row]).epsilon(1e-11));
  }
  const auto audit = audit_record(blocked, EosParams{});
  CHECK(audit.ok());

  auto broken = blocked;
  broken.defects[3].Rp[2] = -1.0;
  CHECK_FALSE(audit_record(broken, EosParams{}).ok());
}

TEST_CASE("Gronwall bound") {
  const EosParams eos;
  // Smooth record with zero defects.
  const auto smooth = make_record(solve(acoustic_pulse(TorusGrid(1, 128), 0.05, eos), 1e-2, 0.2, 0.02), eos);
  const auto a = gronwall_defect_bound(smooth, eos, 0.0, 0.2);
  CHECK(a.pass);
  CHECK(a.constant == doctest::Approx(2.0));
  for (double v : a.defect) CHECK(v <= a.tolerance);
  CHECK(a.warning.empty());

  // Zero rate: the bound collapses to D(0).
  Trajectory still;
  for (int k = 0; k <= 4; ++k) {
    auto f = constant_state(TorusGrid(1, 16), 1.0, {0.5, 0.0});
    f.time = 0.1 * k;
    still.push_back(f);
  }
  DissipativeRecord r{still, {}, ledger_from_snapshots(still, eos), "constant"};
  for (const auto& s : still.snapshots()) {
    auto d = DefectField::zero(s.grid, s.time);
    d.Rp.assign(d.size(), 0.01);
    r.defects.push_back(d);
  }
  const auto b = gronwall_defect_bound(r, eos, 0.0, 0.4);
  for (std::size_t k = 0; k < b.bound.size(); ++k) CHECK(b.bound[k] == doctest::Approx(b.defect[0]));
  CHECK(b.pass);

  // Shock record with positive initial defects: finite constant, bound holds.
  const auto shock = make_record(
      solve(riemann_1d(TorusGrid(1, 256), {1.0, 1.0}, {1.0, -1.0}, 0.13), 1e-3, 0.2, 0.02), eos, 4);
  const auto c = gronwall_defect_bound(shock, eos, 0.0, 0.2);
  CHECK(c.defect.front() > 0.0);
  CHECK(c.pass);
  CHECK(std::isfinite(c.bound.back()));
}

TEST_CASE("vacuum warning") {
  const TorusGrid g(1, 64);
  auto f = constant_state(g, 1.0);
  for (int i = 0; i < 4; ++i) f.rho[static_cast<std::size_t>(i)] = 0.0;
  Trajectory t;
  t.push_back(f);
  DissipativeRecord r{t, {DefectField::zero(g)}, ledger_from_snapshots(t, EosParams{}), ""};
  CHECK_FALSE(gronwall_defect_bound(r, EosParams{}, 0.0, 0.0).warning.empty());
}

TEST_CASE("compatibility verdicts") {
  const EosParams eos;
  const auto smooth = make_record(solve(acoustic_pulse(TorusGrid(1, 256), 5e-3, eos), 1e-2, 0.2, 0.05), eos, 4);
  const auto ok = compatibility_check(smooth, eos);
  CHECK(ok.verdict == Verdict::Classical);
  CHECK(ok.violated.empty());

  const auto shock = make_record(
      solve(riemann_1d(TorusGrid(1, 256), {1.0, 1.0}, {1.0, -1.0}, 0.13), 1e-3, 0.2, 0.05), eos, 4);
  const auto bad = compatibility_check(shock, eos);
  CHECK(bad.verdict == Verdict::Dissipative);
  CHECK(bad.defect_mass > 1e-6 * bad.initial_energy);

  auto thin = smooth;
  Trajectory t;
  for (auto s : smooth.trajectory.snapshots()) {
    s.rho[5] = 0.0;
    s.mom[5] = {0.0, 0.0};
    t.push_back(s);
  }
  thin.trajectory = t;
  const auto vac = compatibility_check(thin, eos);
  CHECK(vac.verdict == Verdict::Dissipative);
  CHECK(vac.violated.front().find("density") != std::string::npos);
  CHECK(std::string(to_string(Verdict::Classical)) == "CLASSICAL");
}

TEST_CASE("Besov seminorm") {
  const TorusGrid g(1, 128);
  const std::vector<double> flat(128, 2.0);
  const auto c = besov_seminorm(flat, g, 0.5, 2.0);
  CHECK(c.seminorm == 0.0);
  CHECK(c.lq_norm == doctest::Approx(2.0 * std::sqrt(2.0)));

  std::vector<double> absx;
  for (std::size_t i = 0; i < 128; ++i) absx.push_back(std::abs(g.center(i)[0]));
  const auto r = besov_seminorm(absx, g, 1.0, kInfinity);
  CHECK(r.seminorm == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> spike(128, 0.0);
  spike[40] = 1.0;
  for (double alpha : {0.25, 0.5, 1.0}) {
    CHECK(besov_seminorm(spike, g, alpha, 1.0).seminorm ==
          doctest::Approx(besov_brute(spike, 128, alpha, 1.0)).epsilon(1e-12));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> noise(128);
  for (auto& v : noise) v = u(rng);
  double prev = 0.0;
  for (double alpha : {0.1, 0.4, 0.7, 1.0}) {
    const double s = besov_seminorm(noise, g, alpha, 2.0).seminorm;
    CHECK(s >= prev);
    prev = s;
  }
  CHECK_THROWS_AS(besov_seminorm(noise, g, 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(besov_seminorm(noise, g, 0.5, 0.5), DomainError);

  // Space-time: a travelling profile has a time modulus as well.
  std::vector<std::vector<double>> st;
  for (int k = 0; k < 8; ++k) {
    std::vector<double> v;
    for (std::size_t i = 0; i < 128; ++i) v.push_back(std::sin(kPi * (g.center(i)[0] - 0.1 * k)));
    st.push_back(v);
  }
  const auto sp = besov_seminorm_spacetime(st, 0.1, g, 1.0, kInfinity);
  CHECK(sp.seminorm == doctest::Approx(kPi).epsilon(1e-2));
}

TEST_CASE("relative energy") {
  const EosParams eos;
  const TorusGrid g(1, 32);
  const auto ref = random_smooth(g, 2);
  CHECK(std::abs(relative_energy(ref, ref, eos)) <= 1e-12);
  const auto one = constant_state(g, 1.0);
  const auto moving = constant_state(g, 1.0, {1.0, 0.0});
  CHECK(relative_energy(moving, one, eos) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_energy(one, constant_state(g, 1e-12), eos), DomainError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.0, 3.0), m(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    ConservedField a(TorusGrid(1, 1));
    a.rho = {r(rng)};
    a.mom = {Vec2{a.rho[0] > 0 ? m(rng) : 0.0, 0.0}};
    const double R = 0.1 + r(rng);
    const Vec2 U{m(rng), 0.0};
    const double e = relative_energy(a, {R}, {U}, eos);
    // Pointwise oracle: kinetic part plus the Bregman distance of P.
    const double kin = a.rho[0] > 0 ? 0.5 * a.rho[0] * std::pow(a.mom[0][0] / a.rho[0] - U[0], 2) : 0.0;
    const double breg = oracle::P(a.rho[0], 1.0, 1.4) - 1.4 / 0.4 * std::pow(R, 0.4) * (a.rho[0] - R) -
                        oracle::P(R, 1.0, 1.4);
    CHECK(e == doctest::Approx(2.0 * (kin + breg)).epsilon(1e-9));
    CHECK(e >= -1e-14);
  }
}

TEST_CASE("weak-strong gap") {
  const EosParams eos;
  const TorusGrid g(1, 128);
  const auto ref = solve(smooth_wave(g, 0.2), 1e-2, 0.1, 0.02);
  const auto same = weak_strong_gap(make_record(ref, eos), ref.trajectory, eos);
  for (double v : same.gap) CHECK(v == 0.0);
  CHECK(std::isinf(same.lambda));

  std::vector<double> gaps;
  const auto inviscid = solve(smooth_wave(g, 0.2), 0.0, 0.1, 0.02);
  for (double eps : {4e-2, 2e-2, 1e-2}) {
    const auto rec = make_record(solve(smooth_wave(g, 0.2), eps, 0.1, 0.02), eos);
    gaps.push_back(weak_strong_gap(rec, inviscid.trajectory, eos).gap.back());
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);

  auto shifted = smooth_wave(g, 0.2);
  shifted.rho[0] += 1e-3;
  const auto pert = make_record(solve(shifted, 0.0, 0.1, 0.02), eos);
  CHECK_THROWS_AS(weak_strong_gap(pert, inviscid.trajectory, eos), IncompatibleError);
  GapOptions relaxed;
  relaxed.require_initial_match = false;
  const auto curve = weak_strong_gap(pert, inviscid.trajectory, eos, relaxed);
  CHECK(curve.gap.front() > 0.0);
  CHECK(std::isfinite(curve.lambda));
  CHECK(curve.reference_d_integral > 0.0);
  CHECK_THROWS_AS(weak_strong_gap(pert, solve(smooth_wave(TorusGrid(1, 64), 0.2), 0.0, 0.1, 0.02).trajectory,
                                  eos, relaxed),
                  IncompatibleError);
}
