#include "dlab/viscous_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dlab {

void ViscosityModel::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("viscosity scale epsilon must be non-negative");
  }
  if (!(shear_mu >= 0.0) || !(bulk_eta >= 0.0)) {
    throw DomainError("viscosity coefficients must be non-negative");
  }
  if (shear_mu == 0.0 && bulk_eta == 0.0) {
    throw DomainError("degenerate viscosity model: shear_mu = bulk_eta = 0");
  }
}

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl < 1.0)) throw DomainError("cfl must lie in (0, 1)");
  if (!(end_time > 0.0)) throw DomainError("end_time must be positive");
  if (!(output_stride > 0.0)) throw DomainError("output_stride must be positive");
  if (!(dt_min > 0.0)) throw DomainError("dt_min must be positive");
  if (!(density_floor > 0.0)) throw DomainError("density_floor must be positive");
}

void EnergyLedger::append(double t, double e, double cumulative_dissipation) {
  times.push_back(t);
  energy.push_back(e);
  dissipation.push_back(cumulative_dissipation);
  slack.push_back(energy.front() - e - cumulative_dissipation);
}

double EnergyLedger::min_slack() const {
  return slack.empty() ? 0.0 : *std::min_element(slack.begin(), slack.end());
}

double EnergyLedger::max_energy() const {
  return energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
}

bool EnergyLedger::dissipation_monotone() const {
  return std::is_sorted(dissipation.begin(), dissipation.end());
}

double EnergyLedger::dissipation_at(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return dissipation.front();
  if (t >= times.back()) return dissipation.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - s) * dissipation[k - 1] + s * dissipation[k];
}

Sym2 viscous_stress(const Mat2& grad_u, const ViscosityModel& model, int dim) {
  const Sym2 d = Sym2::sym_part(grad_u);
  const Sym2 eye = Sym2::identity(dim);
  const double div = dim == 1 ? d.xx : d.trace();
  Sym2 d0 = d - (div / dim) * eye;
  if (dim == 1) d0 = Sym2{};
  return 2.0 * model.shear_mu * d0 + (model.bulk_eta * div) * eye;
}

namespace {

struct TraceSplit {
  Sym2 deviator;
  double trace = 0.0;
};

TraceSplit split(const Sym2& a, int dim) {
  if (dim == 1) return {Sym2{}, a.xx};
  const double tr = a.trace();
  return {a - (tr / dim) * Sym2::identity(dim), tr};
}

}  // namespace

double fenchel_primal(const Sym2& D, const ViscosityModel& model, int dim) {
  const auto [d0, tr] = split(D, dim);
  return model.shear_mu * d0.contract(d0) + 0.5 * model.bulk_eta * tr * tr;
}

double fenchel_dual(const Sym2& S, const ViscosityModel& model, int dim) {
  if (model.shear_mu == 0.0 && model.bulk_eta == 0.0) {
    throw DomainError("degenerate viscosity model: shear_mu = bulk_eta = 0");
  }
  const auto [s0, tr] = split(S, dim);
  const double dev2 = s0.contract(s0);
  double value = 0.0;
  if (dev2 > 0.0) value += model.shear_mu > 0.0 ? dev2 / (4.0 * model.shear_mu) : kInfinity;
  if (tr != 0.0) {
    value += model.bulk_eta > 0.0 ? tr * tr / (2.0 * model.bulk_eta * dim * dim) : kInfinity;
  }
  return value;
}

FenchelTerms fenchel_decomposition(const Sym2& D, const Sym2& S, const ViscosityModel& model,
                                   int dim) {
  if (model.shear_mu == 0.0 && model.bulk_eta == 0.0) {
    throw DomainError("degenerate viscosity model: shear_mu = bulk_eta = 0");
  }
  FenchelTerms t;
  t.primal = fenchel_primal(D, model, dim);
  t.dual = fenchel_dual(S, model, dim);
  const Sym2 dd = dim == 1 ? Sym2{D.xx, 0.0, 0.0} : D;
  const Sym2 ss = dim == 1 ? Sym2{S.xx, 0.0, 0.0} : S;
  t.gap = ss.contract(dd) - t.primal - t.dual;
  return t;
}

std::vector<Mat2> velocity_gradients(const ConservedField& field, double floor) {
  const auto u = velocity_from_conservative(field, floor);
  const TorusGrid& g = field.grid;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  std::vector<Mat2> grad(field.size(), Mat2{});
  for (std::size_t c = 0; c < field.size(); ++c) {
    for (int b = 0; b < g.dim; ++b) {
      const Vec2& up = u[g.shifted(c, b, +1)];
      const Vec2& um = u[g.shifted(c, b, -1)];
      for (int a = 0; a < g.dim; ++a) {
        grad[c][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            (up[static_cast<std::size_t>(a)] - um[static_cast<std::size_t>(a)]) * inv2h;
      }
    }
  }
  return grad;
}

double viscous_dissipation_rate(const ConservedField& field, const ViscosityModel& model,
                                double floor) {
  if (model.epsilon == 0.0) return 0.0;
  const auto grad = velocity_gradients(field, floor);
  double s = 0.0;
  for (const auto& g : grad) s += viscous_stress(g, model, field.grid.dim).contract(g);
  return model.epsilon * s * field.grid.cell_volume();
}

double stable_dt(const ConservedField& field, const EosParams& eos, const ViscosityModel& model,
                 double cfl) {
  const TorusGrid& g = field.grid;
  const double h = g.spacing();
  double max_speed = 0.0;
  double rho_min = kInfinity;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const double r = field.rho[c];
    if (r <= 0.0) continue;
    rho_min = std::min(rho_min, r);
    const double speed = std::sqrt(norm2(field.mom[c])) / r + sound_speed(r, eos);
    max_speed = std::max(max_speed, speed);
  }
  if (rho_min == kInfinity) throw DomainError("stable_dt: field is vacuum everywhere");
  double dt = kInfinity;
  if (max_speed > 0.0) dt = h / (g.dim * max_speed);
  if (model.epsilon > 0.0) {
    const double nu = 2.0 * model.epsilon * (2.0 * model.shear_mu + model.bulk_eta);
    dt = std::min(dt, h * h * rho_min / nu);
  }
  return cfl * dt;
}

namespace {

struct Rhs {
  std::vector<double> drho;
  std::vector<Vec2> dmom;
};

// Semi-discrete operator: conservative flux differences plus eps * div S
// with cell-centred central differences. The central pair is skew-adjoint on
// the torus, so sum_c u_c . (eps div S)_c vol = -viscous_dissipation_rate.
Rhs evaluate_rhs(const ConservedField& f, const EosParams& eos, const ViscosityModel& model,
                 FluxKind flux, double floor) {
  const TorusGrid& g = f.grid;
  const std::size_t n = f.size();
  const double h = g.spacing();
  const int dim = g.dim;

  std::vector<Vec2> u(n);
  std::vector<double> p(n), c(n);
  double global_speed = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = (1.0 / std::max(f.rho[k], floor)) * f.mom[k];
    p[k] = pressure(f.rho[k], eos);
    c[k] = sound_speed(f.rho[k], eos);
    global_speed = std::max(global_speed, std::sqrt(norm2(u[k])) + c[k]);
  }

  Rhs out{std::vector<double>(n, 0.0), std::vector<Vec2>(n, Vec2{0.0, 0.0})};
  std::vector<double> face_rho(n);
  std::vector<Vec2> face_mom(n);
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    // Face k sits between cell k and its +1 neighbor along axis a.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t r = g.shifted(k, a, +1);
      const double speed = flux == FluxKind::Rusanov
                               ? std::max(std::abs(u[k][ua]) + c[k], std::abs(u[r][ua]) + c[r])
                               : global_speed;
      face_rho[k] = 0.5 * (f.mom[k][ua] + f.mom[r][ua]) - 0.5 * speed * (f.rho[r] - f.rho[k]);
      for (std::size_t b = 0; b < 2; ++b) {
        const double pl = f.mom[k][b] * u[k][ua] + (b == ua ? p[k] : 0.0);
        const double pr = f.mom[r][b] * u[r][ua] + (b == ua ? p[r] : 0.0);
        face_mom[k][b] = 0.5 * (pl + pr) - 0.5 * speed * (f.mom[r][b] - f.mom[k][b]);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t l = g.shifted(k, a, -1);
      out.drho[k] -= (face_rho[k] - face_rho[l]) / h;
      out.dmom[k] = out.dmom[k] - (1.0 / h) * (face_mom[k] - face_mom[l]);
    }
  }
  if (dim == 1) {
    for (auto& m : out.dmom) m[1] = 0.0;
  }

  if (model.epsilon > 0.0) {
    const auto grad = velocity_gradients(f, floor);
    std::vector<Sym2> stress(n);
    for (std::size_t k = 0; k < n; ++k) stress[k] = viscous_stress(grad[k], model, dim);
    const double scale = model.epsilon / (2.0 * h);
    for (std::size_t k = 0; k < n; ++k) {
      Vec2 div{0.0, 0.0};
      for (int b = 0; b < dim; ++b) {
        const Sym2& sp = stress[g.shifted(k, b, +1)];
        const Sym2& sm = stress[g.shifted(k, b, -1)];
        // Column b of S contributes to every row a.
        const Vec2 colp = b == 0 ? Vec2{sp.xx, sp.xy} : Vec2{sp.xy, sp.yy};
        const Vec2 colm = b == 0 ? Vec2{sm.xx, sm.xy} : Vec2{sm.xy, sm.yy};
        div = div + (colp - colm);
      }
      if (dim == 1) div[1] = 0.0;
      out.dmom[k] = out.dmom[k] + scale * div;
    }
  }
  return out;
}

ConservedField axpy(const ConservedField& f, double dt, const Rhs& r) {
  ConservedField out = f;
  for (std::size_t k = 0; k < f.size(); ++k) {
    out.rho[k] = f.rho[k] + dt * r.drho[k];
    out.mom[k] = f.mom[k] + dt * r.dmom[k];
  }
  return out;
}

void require_positive_density(const ConservedField& f) {
  for (double r : f.rho) {
    if (!(r >= 0.0)) throw TimestepRejection("negative density after update");
  }
}

}  // namespace

StepOutcome advance(const ConservedField& field, const EosParams& eos,
                    const ViscosityModel& model, double dt, FluxKind flux, TimeScheme scheme,
                    double floor) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const Rhs k1 = evaluate_rhs(field, eos, model, flux, floor);
  ConservedField stage = axpy(field, dt, k1);
  require_positive_density(stage);
  const double diss0 = viscous_dissipation_rate(field, model, floor);
  if (scheme == TimeScheme::Euler) {
    stage.time = field.time + dt;
    return {std::move(stage), dt * diss0};
  }
  const Rhs k2 = evaluate_rhs(stage, eos, model, flux, floor);
  const double diss1 = viscous_dissipation_rate(stage, model, floor);
  ConservedField out = field;
  for (std::size_t k = 0; k < field.size(); ++k) {
    out.rho[k] = 0.5 * (field.rho[k] + stage.rho[k] + dt * k2.drho[k]);
    out.mom[k] = 0.5 * (field.mom[k] + stage.mom[k] + dt * k2.dmom[k]);
  }
  require_positive_density(out);
  out.time = field.time + dt;
  return {std::move(out), 0.5 * dt * (diss0 + diss1)};
}

ConservedField step(const ConservedField& field, const EosParams& eos,
                    const ViscosityModel& model, double dt, FluxKind flux, TimeScheme scheme) {
  return advance(field, eos, model, dt, flux, scheme).field;
}

RunResult run(const ConservedField& initial, const EosParams& eos, const ViscosityModel& model,
              const SolverConfig& config) {
  eos.validate();
  model.validate();
  config.validate();
  if (!initial.admissible()) throw DomainError("initial field is not admissible");
  const double e0 = total_energy(initial, eos);
  if (!std::isfinite(e0)) throw DomainError("initial data must have finite energy");

  RunResult result;
  ConservedField current = initial;
  current.time = 0.0;
  result.trajectory.push_back(current);
  double cumulative = 0.0;
  result.ledger.append(0.0, e0, 0.0);

  const double tol = 1e-12 * config.end_time;
  long next_index = 1;
  auto next_output = [&] {
    return std::min(config.end_time, static_cast<double>(next_index) * config.output_stride);
  };

  while (current.time < config.end_time - tol) {
    const double target = next_output();
    double dt = stable_dt(current, eos, model, config.cfl);
    bool lands = false;
    if (current.time + dt >= target - tol) {
      dt = target - current.time;
      lands = true;
    }
    StepOutcome outcome;
    for (;;) {
      try {
        outcome = advance(current, eos, model, dt, config.flux, config.time_scheme,
                          config.density_floor);
        break;
      } catch (const TimestepRejection&) {
        ++result.rejections;
        dt *= 0.5;
        lands = false;
        if (dt < config.dt_min) {
          throw SolverStallError("time step fell below dt_min at t = " +
                                 std::to_string(current.time));
        }
      }
    }
    current = std::move(outcome.field);
    if (lands) current.time = target;
    cumulative += outcome.dissipation;
    ++result.steps;
    result.ledger.append(current.time, total_energy(current, eos), cumulative);
    if (lands) {
      result.trajectory.push_back(current);
      ++next_index;
    }
  }
  return result;
}

}  // namespace dlab
