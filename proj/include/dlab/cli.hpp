#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dlab/config.hpp"

namespace dlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerificationFailed = 2;

struct CliOptions {
  std::string command;
  std::filesystem::path config;
  /// Empty: $DEL_OUT_DIR/<command>, or ./dlab_out/<command> without it.
  std::filesystem::path out;
  int threads = 1;
  /// Overrides [run] seed when set.
  std::optional<std::uint64_t> seed;
};

/// Every section and key the CLI understands.
const Config::Schema& config_schema();

/// Output directory chosen for the options (after the environment fallback).
std::filesystem::path resolve_output(const CliOptions& options);

/// Runs one of solve, sweep, defects, verify, oscillate, select. Writes the
/// artifacts plus manifest.json and returns kExitOk, kExitVerificationFailed
/// or kExitError. Errors are reported on `log`, never thrown.
int cli_run(const CliOptions& options, std::ostream& log);

}  // namespace dlab
