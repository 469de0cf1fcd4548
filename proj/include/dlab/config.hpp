#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dlab/errors.hpp"

namespace dlab {

/// INI-style configuration:
///
///   # comment            ; also a comment
///   [section]
///   key = value          # trailing comments need a space before # or ;
///   list = [0.1, 0.05]   # brackets optional
///   name = "quoted # text"
///
/// Keys before the first section belong to the section "". Every error is a
/// ConfigError carrying the 1-based line and column of the offending text.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    int key_column = 0;
    int value_column = 0;
  };
  using Schema = std::map<std::string, std::set<std::string>>;

  static Config parse(std::string_view text, std::string source = "<text>");
  /// Throws IoError naming the path when it cannot be read.
  static Config load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  bool has_section(const std::string& section) const { return data_.count(section) != 0; }
  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  const Entry& entry(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  long long get_int(const std::string& section, const std::string& key,
                    std::optional<long long> fallback = std::nullopt) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::optional<std::uint64_t> fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = std::nullopt) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  std::optional<std::vector<double>> fallback = std::nullopt) const;

  /// Rejects sections and keys missing from the schema.
  void require_known(const Schema& schema) const;

  /// Every section and key with its raw value.
  nlohmann::json to_json() const;

 private:
  [[noreturn]] void fail_value(const Entry& e, const std::string& key, const std::string& what,
                               int offset = 0) const;
  [[noreturn]] void fail_missing(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, int> section_lines_;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

}  // namespace dlab
