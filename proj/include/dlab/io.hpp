#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dlab/dissipative_analysis.hpp"

namespace dlab {

/// Binary array container: a fixed 64-byte little-endian header followed by
/// cell data in grid order (x fastest), components contiguous per cell.
///
///   offset  size  field
///        0     8  magic "DELARR\0\0"
///        8     4  version (1)
///       12     4  dim
///       16     4  cells per axis N
///       20     4  component count
///       24     4  scalar width in bytes (8)
///       28     4  byte-order tag 0x01020304
///       32     8  time (float64)
///       40     8  cell count
///       48     4  averaging block H (1 for plain fields)
///       52     4  averaging mode (0 block, 1 window)
///       56     8  reserved, zero
struct ArrayHeader {
  int dim = 1;
  int cells_per_axis = 1;
  int components = 1;
  double time = 0.0;
  int block = 1;
  int mode = 0;
};

inline constexpr std::size_t kArrayHeaderBytes = 64;
inline constexpr std::uint32_t kArrayVersion = 1;

struct ArrayFile {
  ArrayHeader header;
  std::vector<double> data;
};

/// Throws IoError naming the path on any failure.
void write_array(const std::filesystem::path& path, const ArrayFile& file);
ArrayFile read_array(const std::filesystem::path& path);

/// Fields store (rho, m_x) in 1D and (rho, m_x, m_y) in 2D.
void write_field(const std::filesystem::path& path, const ConservedField& field);
ConservedField read_field(const std::filesystem::path& path);

/// Defects store (Rv_xx, Rv_xy, Rv_yy, Rp) on their output grid together with
/// the partition that produced them.
void write_defect(const std::filesystem::path& path, const DefectField& defect);
DefectField read_defect(const std::filesystem::path& path);

/// Numbers are written with 17 significant digits so they round-trip.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  std::size_t rows() const { return rows_.size(); }
  void write(const std::filesystem::path& path) const;

  static std::string number(double v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Record directory layout:
///   record.json        grid, provenance, snapshot count
///   snapshots.csv      index, time, field file, defect file
///   field_XXXX.del     one per snapshot
///   defect_XXXX.del    one per snapshot
///   ledger.csv         time, energy, dissipation, slack
/// Returns every file written, in a fixed order.
std::vector<std::filesystem::path> write_record(const std::filesystem::path& dir,
                                                const DissipativeRecord& record);
DissipativeRecord read_record(const std::filesystem::path& dir);

std::vector<std::filesystem::path> write_trajectory(const std::filesystem::path& dir,
                                                    const Trajectory& traj);
std::filesystem::path write_ledger(const std::filesystem::path& path, const EnergyLedger& ledger);

}  // namespace dlab
