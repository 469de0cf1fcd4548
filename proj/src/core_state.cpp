#include "dlab/core_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dlab {

void EosParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("pressure coefficient a must be positive, got " + std::to_string(a));
  }
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw DomainError("adiabatic exponent gamma must exceed 1, got " + std::to_string(gamma));
  }
}

TorusGrid::TorusGrid(int d, int n) : dim(d), cells_per_axis(n) {
  if (dim != 1 && dim != 2) {
    throw DomainError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (n <= 0) {
    throw DomainError("cells per axis must be positive, got " + std::to_string(n));
  }
}

std::size_t TorusGrid::cell_count() const {
  const auto n = static_cast<std::size_t>(cells_per_axis);
  return dim == 1 ? n : n * n;
}

double TorusGrid::cell_volume() const {
  const double h = spacing();
  return dim == 1 ? h : h * h;
}

std::size_t TorusGrid::index(int i, int j) const {
  const int n = cells_per_axis;
  i = ((i % n) + n) % n;
  if (dim == 1) return static_cast<std::size_t>(i);
  j = ((j % n) + n) % n;
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * static_cast<std::size_t>(j);
}

std::array<int, 2> TorusGrid::coords(std::size_t c) const {
  const auto n = static_cast<std::size_t>(cells_per_axis);
  if (dim == 1) return {static_cast<int>(c), 0};
  return {static_cast<int>(c % n), static_cast<int>(c / n)};
}

std::size_t TorusGrid::shifted(std::size_t c, int axis, int offset) const {
  auto ij = coords(c);
  ij[static_cast<std::size_t>(axis)] += offset;
  return index(ij[0], ij[1]);
}

Vec2 TorusGrid::center(std::size_t c) const {
  const auto ij = coords(c);
  const double h = spacing();
  Vec2 x{-1.0 + (ij[0] + 0.5) * h, 0.0};
  if (dim == 2) x[1] = -1.0 + (ij[1] + 0.5) * h;
  return x;
}

ConservedField::ConservedField(const TorusGrid& g, double t)
    : grid(g), rho(g.cell_count(), 0.0), mom(g.cell_count(), Vec2{0.0, 0.0}), time(t) {}

ConservedField ConservedField::uniform(const TorusGrid& g, double r, const Vec2& m, double t) {
  ConservedField f(g, t);
  std::fill(f.rho.begin(), f.rho.end(), r);
  Vec2 mm = m;
  if (g.dim == 1) mm[1] = 0.0;
  std::fill(f.mom.begin(), f.mom.end(), mm);
  return f;
}

double ConservedField::total_mass() const {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * grid.cell_volume();
}

Vec2 ConservedField::total_momentum() const {
  Vec2 s{0.0, 0.0};
  for (const auto& m : mom) s = s + m;
  return grid.cell_volume() * s;
}

double ConservedField::min_density() const { return *std::min_element(rho.begin(), rho.end()); }

bool ConservedField::admissible() const {
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (!(rho[c] >= 0.0)) return false;
    if (rho[c] == 0.0 && (mom[c][0] != 0.0 || mom[c][1] != 0.0)) return false;
  }
  return true;
}

Trajectory::Trajectory(std::vector<ConservedField> snapshots) {
  for (auto& s : snapshots) push_back(std::move(s));
}

void Trajectory::push_back(ConservedField snapshot) {
  if (!snapshots_.empty()) {
    if (!(snapshot.grid == snapshots_.front().grid)) {
      throw IncompatibleError("trajectory snapshots must share one grid");
    }
    if (!(snapshot.time > snapshots_.back().time)) {
      throw IncompatibleError("trajectory snapshot times must increase strictly");
    }
  }
  snapshots_.push_back(std::move(snapshot));
}

const TorusGrid& Trajectory::grid() const {
  if (snapshots_.empty()) throw DomainError("empty trajectory has no grid");
  return snapshots_.front().grid;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots_.size());
  for (const auto& s : snapshots_) t.push_back(s.time);
  return t;
}

std::size_t Trajectory::index_at(double t, double tol) const {
  for (std::size_t k = 0; k < snapshots_.size(); ++k) {
    if (std::abs(snapshots_[k].time - t) <= tol * std::max(1.0, std::abs(t))) return k;
  }
  throw DomainError("no snapshot at time " + std::to_string(t));
}

namespace {
void require_nonnegative(double rho) {
  if (!(rho >= 0.0)) throw DomainError("density must be non-negative, got " + std::to_string(rho));
}
}  // namespace

double pressure(double rho, const EosParams& eos) {
  require_nonnegative(rho);
  return eos.a * std::pow(rho, eos.gamma);
}

double pressure_potential(double rho, const EosParams& eos) {
  require_nonnegative(rho);
  return eos.a / (eos.gamma - 1.0) * std::pow(rho, eos.gamma);
}

double pressure_potential_derivative(double rho, const EosParams& eos) {
  require_nonnegative(rho);
  return eos.a * eos.gamma / (eos.gamma - 1.0) * std::pow(rho, eos.gamma - 1.0);
}

double sound_speed(double rho, const EosParams& eos) {
  require_nonnegative(rho);
  return std::sqrt(eos.gamma * eos.a * std::pow(rho, eos.gamma - 1.0));
}

double kinetic_extended(double rho, const Vec2& mom) {
  const double m2 = norm2(mom);
  if (m2 == 0.0) return 0.0;
  if (rho > 0.0) return m2 / rho;
  return kInfinity;
}

double total_energy_density(double rho, const Vec2& mom, const EosParams& eos) {
  return 0.5 * kinetic_extended(rho, mom) + pressure_potential(rho, eos);
}

double total_energy(const ConservedField& field, const EosParams& eos) {
  double s = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    s += total_energy_density(field.rho[c], field.mom[c], eos);
  }
  return s * field.grid.cell_volume();
}

std::vector<Vec2> velocity_from_conservative(const ConservedField& field, double floor) {
  if (!(floor > 0.0)) throw DomainError("density floor must be positive");
  std::vector<Vec2> u(field.size());
  for (std::size_t c = 0; c < field.size(); ++c) {
    u[c] = (1.0 / std::max(field.rho[c], floor)) * field.mom[c];
  }
  return u;
}

}  // namespace dlab
