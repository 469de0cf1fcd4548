#include "dlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dlab {

namespace {

bool key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::size_t skip_blank(std::string_view s, std::size_t i) {
  while (i < s.size() && blank(s[i])) ++i;
  return i;
}

/// Position of a trailing comment (whitespace then # or ;) or npos.
std::size_t comment_start(std::string_view s, std::size_t from) {
  for (std::size_t i = from; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == from || blank(s[i - 1]))) return i;
  }
  return std::string_view::npos;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

int col(std::size_t i) { return static_cast<int>(i) + 1; }

}  // namespace

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  auto located = [&](const std::string& msg, int line, int column) {
    return ConfigError(cfg.source_ + ": " + msg, line, column);
  };
  std::string section;
  cfg.section_lines_[section] = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::size_t i = skip_blank(line, 0);
    if (i == line.size() || line[i] == '#' || line[i] == ';') continue;

    if (line[i] == '[') {
      const std::size_t close = line.find(']', i);
      if (close == std::string_view::npos) {
        throw located("missing ']' after section name", line_no, col(rtrim(line).size()));
      }
      std::size_t a = skip_blank(line, i + 1);
      std::size_t b = close;
      while (b > a && blank(line[b - 1])) --b;
      if (a == b) throw located("empty section name", line_no, col(i + 1));
      for (std::size_t k = a; k < b; ++k) {
        if (!key_char(line[k])) {
          throw located(std::string("invalid character '") + line[k] + "' in section name", line_no, col(k));
        }
      }
      const std::size_t rest = skip_blank(line, close + 1);
      if (rest < line.size() && line[rest] != '#' && line[rest] != ';') {
        throw located("unexpected text after section header", line_no, col(rest));
      }
      std::string name(line.substr(a, b - a));
      if (cfg.data_.count(name)) {
        throw located("section [" + name + "] appears twice (first on line " +
                              std::to_string(cfg.section_lines_.at(name)) + ")",
                          line_no, col(i));
      }
      section = std::move(name);
      cfg.section_lines_[section] = line_no;
      cfg.data_[section];
      continue;
    }

    const std::size_t eq = line.find('=', i);
    if (eq == std::string_view::npos) {
      throw located("expected 'key = value'", line_no, col(i));
    }
    std::size_t kend = eq;
    while (kend > i && blank(line[kend - 1])) --kend;
    if (kend == i) throw located("missing key before '='", line_no, col(eq));
    for (std::size_t k = i; k < kend; ++k) {
      if (!key_char(line[k])) {
        throw located(std::string("invalid character '") + line[k] + "' in key", line_no, col(k));
      }
    }
    const std::string key(line.substr(i, kend - i));

    std::size_t v = skip_blank(line, eq + 1);
    std::string value;
    if (v < line.size() && line[v] == '"') {
      const std::size_t close = line.find('"', v + 1);
      if (close == std::string_view::npos) throw located("unterminated quoted value", line_no, col(v));
      value = std::string(line.substr(v + 1, close - v - 1));
      const std::size_t rest = skip_blank(line, close + 1);
      if (rest < line.size() && line[rest] != '#' && line[rest] != ';') {
        throw located("unexpected text after quoted value", line_no, col(rest));
      }
    } else {
      const std::size_t c = comment_start(line, v);
      value = std::string(rtrim(line.substr(v, c == std::string_view::npos ? std::string_view::npos : c - v)));
    }

    auto& sec = cfg.data_[section];
    if (sec.count(key)) {
      throw located("duplicate key '" + key + "' (first set on line " +
                            std::to_string(sec.at(key).line) + ")",
                        line_no, col(i));
    }
    sec[key] = Entry{value, line_no, col(i), col(v)};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse(s.str(), path.string());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  return it != data_.end() && it->second.count(key) != 0;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, keys] : data_) out.push_back(name);
  return out;
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail_missing(section, key);
  return data_.at(section).at(key);
}

void Config::fail_value(const Entry& e, const std::string& key, const std::string& what,
                        int offset) const {
  throw ConfigError(source_ + ": " + key + " " + what, e.line, e.value_column + offset);
}

void Config::fail_missing(const std::string& section, const std::string& key) const {
  const auto it = section_lines_.find(section);
  const int line = it == section_lines_.end() ? 0 : it->second;
  throw ConfigError(source_ + ": missing required key '" + key + "' in section [" + section + "]",
                    line, line > 0 ? 1 : 0);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               std::optional<std::string> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  return entry(section, key).value;
}

double Config::get_double(const std::string& section, const std::string& key,
                          std::optional<double> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  const auto& e = entry(section, key);
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (e.value.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    fail_value(e, key, "expects a finite decimal number, got '" + e.value + "'",
               r.ptr == end ? 0 : static_cast<int>(r.ptr - e.value.data()));
  }
  return v;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          std::optional<long long> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  const auto& e = entry(section, key);
  long long v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (e.value.empty() || r.ec != std::errc() || r.ptr != end) {
    fail_value(e, key, "expects an integer, got '" + e.value + "'",
               r.ptr == end ? 0 : static_cast<int>(r.ptr - e.value.data()));
  }
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::optional<std::uint64_t> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  const auto& e = entry(section, key);
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (e.value.empty() || r.ec != std::errc() || r.ptr != end) {
    fail_value(e, key, "expects a non-negative integer, got '" + e.value + "'",
               r.ptr == end ? 0 : static_cast<int>(r.ptr - e.value.data()));
  }
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      std::optional<bool> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  const auto& e = entry(section, key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail_value(e, key, "expects true or false, got '" + e.value + "'");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        std::optional<std::vector<double>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    fail_missing(section, key);
  }
  const auto& e = entry(section, key);
  std::string_view s = e.value;
  std::size_t i = 0, stop = s.size();
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail_value(e, key, "list is missing its closing ']'", static_cast<int>(s.size()));
    i = 1;
    stop = s.size() - 1;
  }
  std::vector<double> out;
  while (true) {
    i = skip_blank(s, i);
    std::size_t j = s.find(',', i);
    if (j == std::string_view::npos || j > stop) j = stop;
    std::size_t k = j;
    while (k > i && blank(s[k - 1])) --k;
    if (k == i) {
      if (out.empty() && j == stop) break;
      fail_value(e, key, "has an empty list item", static_cast<int>(i));
    }
    double v = 0.0;
    const auto r = std::from_chars(s.data() + i, s.data() + k, v);
    if (r.ec != std::errc() || r.ptr != s.data() + k || !std::isfinite(v)) {
      fail_value(e, key, "list item '" + std::string(s.substr(i, k - i)) + "' is not a decimal number",
                 static_cast<int>(r.ptr - s.data()));
    }
    out.push_back(v);
    if (j == stop) break;
    i = j + 1;
  }
  if (out.empty()) fail_value(e, key, "expects at least one number");
  return out;
}

void Config::require_known(const Schema& schema) const {
  for (const auto& [section, keys] : data_) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      if (keys.empty() && section.empty()) continue;
      const int line = section_lines_.at(section);
      if (section.empty()) {
        const auto& first = keys.begin()->second;
        throw ConfigError(source_ + ": keys must appear inside a section", first.line, first.key_column);
      }
      throw ConfigError(source_ + ": unknown section [" + section + "]", line, 1);
    }
    for (const auto& [key, e] : keys) {
      if (!it->second.count(key)) {
        throw ConfigError(source_ + ": unknown key '" + key + "' in section [" + section + "]", e.line,
                          e.key_column);
      }
    }
  }
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, keys] : data_) {
    if (section.empty() && keys.empty()) continue;
    auto& s = j[section];
    s = nlohmann::json::object();
    for (const auto& [key, e] : keys) s[key] = e.value;
  }
  return j;
}

}  // namespace dlab
