#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dlab {

/// Lowercase hex SHA-256 of a file's bytes; throws IoError naming the path.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

inline constexpr const char* kVersion = "1.0.0";

/// Per-run manifest: config echo, versions, seeds, input and output digests
/// and verdicts. Paths are stored relative to the output root.
class RunManifest {
 public:
  RunManifest(std::string command, std::filesystem::path root);

  void set_config(const nlohmann::json& echo, const std::string& source);
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_threads(int threads) { threads_ = threads; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void add_outputs(const std::vector<std::filesystem::path>& paths);
  /// Named verdict, e.g. "energy_inequality" -> "PASS".
  void verdict(const std::string& name, const nlohmann::json& value);

  const std::vector<std::filesystem::path>& outputs() const { return outputs_; }
  /// Digests every output and writes manifest.json under the root.
  std::filesystem::path write() const;
  nlohmann::json to_json() const;

 private:
  std::string relative(const std::filesystem::path& p) const;

  std::string command_;
  std::filesystem::path root_;
  nlohmann::json config_ = nlohmann::json::object();
  std::string config_source_;
  std::uint64_t seed_ = 0;
  int threads_ = 1;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  nlohmann::json verdicts_ = nlohmann::json::object();
};

}  // namespace dlab
