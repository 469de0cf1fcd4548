#include "dlab/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace dlab {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 8> kMagic{'D', 'E', 'L', 'A', 'R', 'R', '\0', '\0'};
constexpr std::uint32_t kOrderTag = 0x01020304u;

template <class U>
void put_le(unsigned char* out, U v) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out[b] = static_cast<unsigned char>((v >> (8 * b)) & 0xFFu);
}

template <class U>
U get_le(const unsigned char* in) {
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(in[b]) << (8 * b);
  return v;
}

void put_f64(unsigned char* out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const unsigned char* in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::string numbered(const char* stem, std::size_t k) {
  std::ostringstream s;
  s << stem << '_' << std::setw(4) << std::setfill('0') << k << ".del";
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string quote_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  return cells;
}

double parse_number(const std::string& s, const fs::path& path) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw IoError("bad number '" + s + "' in " + path.string());
  }
  return v;
}

}  // namespace

void write_array(const fs::path& path, const ArrayFile& file) {
  const auto& h = file.header;
  TorusGrid grid(h.dim, h.cells_per_axis);
  if (h.components < 1) throw IoError("array for " + path.string() + " needs at least one component");
  const std::size_t cells = grid.cell_count();
  if (file.data.size() != cells * static_cast<std::size_t>(h.components)) {
    throw IoError("array data size does not match its header for " + path.string());
  }
  std::array<unsigned char, kArrayHeaderBytes> head{};
  std::memcpy(head.data(), kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(head.data() + 8, kArrayVersion);
  put_le<std::uint32_t>(head.data() + 12, static_cast<std::uint32_t>(h.dim));
  put_le<std::uint32_t>(head.data() + 16, static_cast<std::uint32_t>(h.cells_per_axis));
  put_le<std::uint32_t>(head.data() + 20, static_cast<std::uint32_t>(h.components));
  put_le<std::uint32_t>(head.data() + 24, 8u);
  put_le<std::uint32_t>(head.data() + 28, kOrderTag);
  put_f64(head.data() + 32, h.time);
  put_le<std::uint64_t>(head.data() + 40, cells);
  put_le<std::uint32_t>(head.data() + 48, static_cast<std::uint32_t>(h.block));
  put_le<std::uint32_t>(head.data() + 52, static_cast<std::uint32_t>(h.mode));

  std::vector<unsigned char> body(file.data.size() * 8);
  for (std::size_t i = 0; i < file.data.size(); ++i) put_f64(body.data() + 8 * i, file.data[i]);
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

ArrayFile read_array(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<unsigned char, kArrayHeaderBytes> head{};
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  if (in.gcount() != static_cast<std::streamsize>(head.size())) {
    throw IoError(path.string() + " is shorter than the 64-byte header");
  }
  if (std::memcmp(head.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError(path.string() + " is not an array container (bad magic)");
  }
  if (get_le<std::uint32_t>(head.data() + 8) != kArrayVersion) {
    throw IoError(path.string() + " has unsupported container version");
  }
  if (get_le<std::uint32_t>(head.data() + 24) != 8u || get_le<std::uint32_t>(head.data() + 28) != kOrderTag) {
    throw IoError(path.string() + " uses an unsupported scalar width or byte order");
  }
  ArrayFile f;
  f.header.dim = static_cast<int>(get_le<std::uint32_t>(head.data() + 12));
  f.header.cells_per_axis = static_cast<int>(get_le<std::uint32_t>(head.data() + 16));
  f.header.components = static_cast<int>(get_le<std::uint32_t>(head.data() + 20));
  f.header.time = get_f64(head.data() + 32);
  f.header.block = static_cast<int>(get_le<std::uint32_t>(head.data() + 48));
  f.header.mode = static_cast<int>(get_le<std::uint32_t>(head.data() + 52));
  std::size_t cells = 0;
  try {
    cells = TorusGrid(f.header.dim, f.header.cells_per_axis).cell_count();
  } catch (const DomainError& e) {
    throw IoError(path.string() + " has an invalid grid: " + e.what());
  }
  if (get_le<std::uint64_t>(head.data() + 40) != cells || f.header.components < 1) {
    throw IoError(path.string() + " has an inconsistent header");
  }
  const std::size_t n = cells * static_cast<std::size_t>(f.header.components);
  std::vector<unsigned char> body(n * 8);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (in.gcount() != static_cast<std::streamsize>(body.size())) {
    throw IoError(path.string() + " is truncated");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + " has trailing bytes");
  f.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.data[i] = get_f64(body.data() + 8 * i);
  return f;
}

void write_field(const fs::path& path, const ConservedField& field) {
  ArrayFile f;
  f.header = {field.grid.dim, field.grid.cells_per_axis, field.grid.dim + 1, field.time, 1, 0};
  f.data.reserve(field.size() * static_cast<std::size_t>(f.header.components));
  for (std::size_t c = 0; c < field.size(); ++c) {
    f.data.push_back(field.rho[c]);
    f.data.push_back(field.mom[c][0]);
    if (field.grid.dim == 2) f.data.push_back(field.mom[c][1]);
  }
  write_array(path, f);
}

ConservedField read_field(const fs::path& path) {
  const auto f = read_array(path);
  const auto& h = f.header;
  if (h.components != h.dim + 1) throw IoError(path.string() + " does not hold a conserved field");
  ConservedField field(TorusGrid(h.dim, h.cells_per_axis), h.time);
  const auto nc = static_cast<std::size_t>(h.components);
  for (std::size_t c = 0; c < field.size(); ++c) {
    field.rho[c] = f.data[nc * c];
    field.mom[c][0] = f.data[nc * c + 1];
    if (h.dim == 2) field.mom[c][1] = f.data[nc * c + 2];
  }
  return field;
}

void write_defect(const fs::path& path, const DefectField& defect) {
  const TorusGrid g = defect.grid();
  ArrayFile f;
  f.header = {g.dim, g.cells_per_axis, 4, defect.time, defect.partition.block,
              defect.partition.mode == AveragingMode::Window ? 1 : 0};
  for (std::size_t c = 0; c < defect.size(); ++c) {
    f.data.insert(f.data.end(), {defect.Rv[c].xx, defect.Rv[c].xy, defect.Rv[c].yy, defect.Rp[c]});
  }
  write_array(path, f);
}

DefectField read_defect(const fs::path& path) {
  const auto f = read_array(path);
  const auto& h = f.header;
  if (h.components != 4 || h.block < 1 || (h.mode != 0 && h.mode != 1)) {
    throw IoError(path.string() + " does not hold a defect field");
  }
  const auto mode = h.mode == 1 ? AveragingMode::Window : AveragingMode::Block;
  const int fine_n = mode == AveragingMode::Block ? h.cells_per_axis * h.block : h.cells_per_axis;
  DefectField d;
  try {
    d.partition = BlockPartition(TorusGrid(h.dim, fine_n), h.block, mode);
  } catch (const Error& e) {
    throw IoError(path.string() + " has an invalid partition: " + e.what());
  }
  d.time = h.time;
  const std::size_t cells = f.data.size() / 4;
  d.Rv.resize(cells);
  d.Rp.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    d.Rv[c] = Sym2{f.data[4 * c], f.data[4 * c + 1], f.data[4 * c + 2]};
    d.Rp[c] = f.data[4 * c + 3];
  }
  return d;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw IoError("CSV row width does not match the header");
  rows_.push_back(cells);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(number(v));
  row(cells);
}

std::string CsvWriter::number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void CsvWriter::write(const fs::path& path) const {
  auto out = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote_cell(cells[i]);
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  if (!out) throw IoError("write failed for " + path.string());
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IoError("CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) throw IoError("ragged row in " + path.string());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<fs::path> write_trajectory(const fs::path& dir, const Trajectory& traj) {
  ensure_dir(dir);
  std::vector<fs::path> files;
  CsvWriter index({"index", "time", "field"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto name = numbered("field", k);
    write_field(dir / name, traj[k]);
    files.push_back(dir / name);
    index.row({std::to_string(k), CsvWriter::number(traj[k].time), name});
  }
  index.write(dir / "snapshots.csv");
  files.insert(files.begin(), dir / "snapshots.csv");
  return files;
}

fs::path write_ledger(const fs::path& path, const EnergyLedger& ledger) {
  CsvWriter w({"time", "energy", "dissipation", "slack"});
  for (std::size_t l = 0; l < ledger.size(); ++l) {
    w.row(std::vector<double>{ledger.times[l], ledger.energy[l], ledger.dissipation[l], ledger.slack[l]});
  }
  w.write(path);
  return path;
}

std::vector<fs::path> write_record(const fs::path& dir, const DissipativeRecord& record) {
  ensure_dir(dir);
  if (record.defects.size() != record.trajectory.size()) {
    throw IoError("record for " + dir.string() + " has mismatched defects");
  }
  std::vector<fs::path> files;
  const auto& g = record.grid();
  nlohmann::json meta = {{"dim", g.dim},
                         {"cells_per_axis", g.cells_per_axis},
                         {"snapshots", record.trajectory.size()},
                         {"provenance", record.provenance}};
  {
    auto out = open_out(dir / "record.json");
    out << meta.dump(2) << '\n';
  }
  files.push_back(dir / "record.json");

  CsvWriter index({"index", "time", "field", "defect"});
  std::vector<fs::path> blobs;
  for (std::size_t k = 0; k < record.trajectory.size(); ++k) {
    const auto fname = numbered("field", k);
    const auto dname = numbered("defect", k);
    write_field(dir / fname, record.trajectory[k]);
    write_defect(dir / dname, record.defects[k]);
    blobs.push_back(dir / fname);
    blobs.push_back(dir / dname);
    index.row({std::to_string(k), CsvWriter::number(record.trajectory[k].time), fname, dname});
  }
  index.write(dir / "snapshots.csv");
  files.push_back(dir / "snapshots.csv");
  files.insert(files.end(), blobs.begin(), blobs.end());
  files.push_back(write_ledger(dir / "ledger.csv", record.ledger));
  return files;
}

DissipativeRecord read_record(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("record directory " + dir.string() + " does not exist");
  DissipativeRecord rec;
  {
    std::ifstream in(dir / "record.json");
    if (!in) throw IoError("cannot open " + (dir / "record.json").string());
    try {
      const auto meta = nlohmann::json::parse(in);
      rec.provenance = meta.value("provenance", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad " + (dir / "record.json").string() + ": " + e.what());
    }
  }
  const auto index = read_csv(dir / "snapshots.csv");
  const auto cf = index.column("field"), cd = index.column("defect");
  for (const auto& r : index.rows) {
    rec.trajectory.push_back(read_field(dir / r[cf]));
    rec.defects.push_back(read_defect(dir / r[cd]));
  }
  const auto ledger = read_csv(dir / "ledger.csv");
  const auto ct = ledger.column("time"), ce = ledger.column("energy"), cdiss = ledger.column("dissipation");
  for (const auto& r : ledger.rows) {
    rec.ledger.append(parse_number(r[ct], dir / "ledger.csv"), parse_number(r[ce], dir / "ledger.csv"),
                      parse_number(r[cdiss], dir / "ledger.csv"));
  }
  return rec;
}

}  // namespace dlab
