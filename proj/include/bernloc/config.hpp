#pragma once

// Flat `key = value` mission configuration files.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "bernloc/mission.hpp"

namespace bernloc {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  /// 1-based line of the offending entry, 0 when not tied to a line.
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses and validates a configuration. Throws ConfigError.
MissionConfig parse_config(const std::string& text);
MissionConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const MissionConfig& config);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace bernloc
