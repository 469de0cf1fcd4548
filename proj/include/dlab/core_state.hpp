#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/tensor.hpp"

namespace dlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultDensityFloor = 1e-10;

/// Barotropic gamma law p(rho) = a * rho^gamma.
struct EosParams {
  double a = 1.0;
  double gamma = 1.4;

  /// Throws DomainError unless a > 0 and gamma > 1.
  void validate() const;
};

/// Uniform periodic grid on the flat torus [-1, 1]^dim, dim in {1, 2}.
///
/// Cells are stored with the x index fastest: cell (i, j) has linear index
/// i + N * j. Cell centers sit at -1 + (i + 1/2) h with h = 2 / N.
struct TorusGrid {
  int dim = 1;
  int cells_per_axis = 1;

  TorusGrid() = default;
  TorusGrid(int dim, int cells_per_axis);

  double spacing() const { return 2.0 / cells_per_axis; }
  std::size_t cell_count() const;
  double cell_volume() const;
  double domain_volume() const { return dim == 1 ? 2.0 : 4.0; }

  std::size_t index(int i, int j = 0) const;
  /// Periodic neighbor of cell `c` shifted by `offset` cells along `axis`.
  std::size_t shifted(std::size_t c, int axis, int offset) const;
  /// Per-axis integer coordinates of a linear index.
  std::array<int, 2> coords(std::size_t c) const;
  Vec2 center(std::size_t c) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

/// Conserved state (density, momentum) on a torus grid at one instant.
struct ConservedField {
  TorusGrid grid;
  std::vector<double> rho;
  std::vector<Vec2> mom;
  double time = 0.0;

  ConservedField() = default;
  explicit ConservedField(const TorusGrid& g, double t = 0.0);

  static ConservedField uniform(const TorusGrid& g, double rho, const Vec2& mom, double t = 0.0);

  std::size_t size() const { return rho.size(); }
  double total_mass() const;
  Vec2 total_momentum() const;
  double min_density() const;
  /// rho >= 0 everywhere and mom = 0 wherever rho = 0.
  bool admissible() const;
};

/// Time-ordered snapshots sharing one grid.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<ConservedField> snapshots);

  /// Appends a snapshot; throws IncompatibleError on grid mismatch or
  /// non-increasing time.
  void push_back(ConservedField snapshot);

  const std::vector<ConservedField>& snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  const ConservedField& operator[](std::size_t k) const { return snapshots_[k]; }
  const ConservedField& front() const { return snapshots_.front(); }
  const ConservedField& back() const { return snapshots_.back(); }
  const TorusGrid& grid() const;
  std::vector<double> times() const;

  /// Index of the snapshot at time t (within tol), or throws DomainError.
  std::size_t index_at(double t, double tol = 1e-12) const;

 private:
  std::vector<ConservedField> snapshots_;
};

double pressure(double rho, const EosParams& eos);
double pressure_potential(double rho, const EosParams& eos);
/// P'(rho) = a gamma / (gamma - 1) rho^(gamma - 1).
double pressure_potential_derivative(double rho, const EosParams& eos);
double sound_speed(double rho, const EosParams& eos);

/// Convex lower-semicontinuous extension of |m|^2 / rho: 0 when m = 0,
/// |m|^2 / rho when rho > 0 and +infinity otherwise.
double kinetic_extended(double rho, const Vec2& mom);

/// 1/2 |m|^2 / rho + P(rho), propagating the infinite branch.
double total_energy_density(double rho, const Vec2& mom, const EosParams& eos);

/// Cell-volume weighted sum of the energy density.
double total_energy(const ConservedField& field, const EosParams& eos);

/// u = m / max(rho, floor) per cell.
std::vector<Vec2> velocity_from_conservative(const ConservedField& field,
                                             double floor = kDefaultDensityFloor);

}  // namespace dlab
