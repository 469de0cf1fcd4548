#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dlab/dissipative_analysis.hpp"

namespace dlab {

/// 1/2 |m|^2 / rho + P(rho) + 1/2 tr Rv + Rp / (gamma - 1) per cell of the
/// record grid at snapshot time t, averaged over H x H blocks of that grid.
std::vector<double> energy_density_total(const DissipativeRecord& record, double t,
                                         const EosParams& eos, int block = 1);

enum class Precedence { Precedes, Reversed, Incomparable };
const char* to_string(Precedence p);

/// Discrete a < b: Precedes when the total energy density of a stays below
/// that of b + tol at every snapshot and cell, Reversed when the opposite
/// holds (and the first fails), Incomparable otherwise. tol = 1e-10 times the
/// larger initial total energy. Throws IncompatibleError unless grids,
/// snapshot times and defect partitions agree.
Precedence precedes(const DissipativeRecord& a, const DissipativeRecord& b, const EosParams& eos,
                    int block = 1);

inline constexpr double kInitialDataTolerance = 1e-10;

/// Records sharing one grid, snapshot times and initial data.
struct Ensemble {
  std::vector<DissipativeRecord> members;

  /// Throws IncompatibleError on mismatched discretizations or initial data
  /// differing by more than kInitialDataTolerance, DomainError if a member
  /// fails its audit.
  void validate(const EosParams& eos) const;
};

/// int_0^T int total energy density dx dt by the trapezoid rule in time.
double energy_functional(const DissipativeRecord& record, const EosParams& eos);

struct CertificateEntry {
  std::size_t member = 0;
  /// Verdict of precedes(winner, member).
  Precedence verdict = Precedence::Incomparable;
  double functional = 0.0;
};

struct Selection {
  std::size_t winner = 0;
  std::vector<double> functionals;
  std::vector<CertificateEntry> certificate;
  /// True when no other member strictly precedes the winner.
  bool minimal = true;
};

/// Member minimizing energy_functional; ties go to the lowest index. Throws
/// DomainError for an empty ensemble.
Selection select_admissible(const Ensemble& ensemble, const EosParams& eos);

/// lambda a + (1 - lambda) b. Defects combine affinely and pick up the
/// convexity gap of the two states, so that fluxes plus defects (and total
/// energy) are exactly affine in lambda. Throws DomainError for lambda
/// outside [0, 1] and IncompatibleError for mismatched discretizations.
DissipativeRecord convex_combine(const DissipativeRecord& a, const DissipativeRecord& b,
                                 double lambda, const EosParams& eos);

}  // namespace dlab
