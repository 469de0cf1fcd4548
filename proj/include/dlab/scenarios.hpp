#pragma once

#include <cstdint>

#include "dlab/core_state.hpp"

namespace dlab {

// Initial-data generators shared by the CLI, tests and the python module.

struct PrimitiveState {
  double rho = 1.0;
  double u = 0.0;
};

ConservedField constant_state(const TorusGrid& grid, double rho, const Vec2& mom = {0.0, 0.0});

/// Two-state periodic data along x: `left` on [x0 - 1, x0), `right` on
/// [x0, x0 + 1), both taken modulo the period 2. In 2D the data is constant in y.
ConservedField riemann_1d(const TorusGrid& grid, const PrimitiveState& left,
                          const PrimitiveState& right, double x0 = 0.0);

/// rho = 1 + A s(x), m = A c0 s(x) with s = sin(pi x) (times sin(pi y) in 2D).
/// To first order a right-running acoustic wave on the rest state rho = 1.
ConservedField acoustic_pulse(const TorusGrid& grid, double amplitude, const EosParams& eos);

/// rho = 1 + A sin(pi x), m = A sin(pi x); smooth until the wave steepens.
ConservedField smooth_wave(const TorusGrid& grid, double amplitude);

/// Sum of a few low Fourier modes with random phases, density kept in
/// [1 - amplitude, 1 + amplitude].
ConservedField random_smooth(const TorusGrid& grid, std::uint64_t seed, double amplitude = 0.2);

}  // namespace dlab
