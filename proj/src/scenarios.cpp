#include "dlab/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace dlab {

ConservedField constant_state(const TorusGrid& grid, double rho, const Vec2& mom) {
  if (!(rho >= 0.0)) throw DomainError("constant state density must be non-negative");
  return ConservedField::uniform(grid, rho, mom);
}

ConservedField riemann_1d(const TorusGrid& grid, const PrimitiveState& left,
                          const PrimitiveState& right, double x0) {
  if (!(left.rho > 0.0) || !(right.rho > 0.0)) {
    throw DomainError("Riemann states need positive density");
  }
  ConservedField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double x = grid.center(c)[0];
    // Position relative to x0, wrapped into [-1, 1).
    const double s = x - x0 + 1.0 - 2.0 * std::floor((x - x0 + 1.0) / 2.0) - 1.0;
    const PrimitiveState& w = s < 0.0 ? left : right;
    f.rho[c] = w.rho;
    f.mom[c] = {w.rho * w.u, 0.0};
  }
  return f;
}

ConservedField acoustic_pulse(const TorusGrid& grid, double amplitude, const EosParams& eos) {
  if (!(std::abs(amplitude) < 1.0)) throw DomainError("pulse amplitude must be below 1");
  const double c0 = sound_speed(1.0, eos);
  ConservedField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Vec2 x = grid.center(c);
    double s = std::sin(std::numbers::pi * x[0]);
    if (grid.dim == 2) s *= std::sin(std::numbers::pi * x[1]);
    f.rho[c] = 1.0 + amplitude * s;
    f.mom[c] = {amplitude * c0 * s, 0.0};
  }
  return f;
}

ConservedField smooth_wave(const TorusGrid& grid, double amplitude) {
  if (!(std::abs(amplitude) < 1.0)) throw DomainError("wave amplitude must be below 1");
  ConservedField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double s = std::sin(std::numbers::pi * grid.center(c)[0]);
    f.rho[c] = 1.0 + amplitude * s;
    f.mom[c] = {amplitude * s, 0.0};
  }
  return f;
}

ConservedField random_smooth(const TorusGrid& grid, std::uint64_t seed, double amplitude) {
  if (!(amplitude > 0.0 && amplitude < 1.0)) throw DomainError("amplitude must lie in (0, 1)");
  constexpr int kModes = 3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);

  struct Mode {
    int kx, ky;
    double phase, w;
  };
  auto draw = [&](int count) {
    std::vector<Mode> modes;
    for (int k = 1; k <= count; ++k) {
      const int ky = grid.dim == 2 ? k % 2 : 0;
      modes.push_back({k, ky, phase(rng), weight(rng)});
    }
    return modes;
  };
  const auto rho_modes = draw(kModes);
  const auto ux_modes = draw(kModes);
  const auto uy_modes = draw(kModes);
  auto eval = [&](const std::vector<Mode>& modes, const Vec2& x) {
    double s = 0.0;
    for (const auto& m : modes) {
      s += m.w * std::sin(std::numbers::pi * (m.kx * x[0] + m.ky * x[1]) + m.phase);
    }
    return s / kModes;
  };

  ConservedField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Vec2 x = grid.center(c);
    f.rho[c] = 1.0 + amplitude * eval(rho_modes, x);
    const Vec2 u{amplitude * eval(ux_modes, x), grid.dim == 2 ? amplitude * eval(uy_modes, x) : 0.0};
    f.mom[c] = f.rho[c] * u;
  }
  return f;
}

}  // namespace dlab
