#pragma once

// Run configuration files: one `key = value` per line, '#' comments.

#include "esdf/cases.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace esdf {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

struct OutputOptions {
  std::string dir = "out";
  long series_interval = 1;    // steps between time-series rows
  long snapshot_interval = 0;  // steps between field snapshots; 0 = final only
};

struct RunRequest {
  CaseSetup setup;
  OutputOptions output;
  std::uint64_t seed = 1;
  std::vector<ConfigEntry> entries;  // effective entries, in application order
};

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source = "<text>");
/// Throws ConfigError when the file cannot be read.
std::vector<ConfigEntry> load_config_file(const std::string& path);

/// Applies entries in order. The `case` key, if present, must come first
/// and resets the setup. Unknown keys and bad values throw ConfigError with
/// the line and key.
void apply_entries(RunRequest& req, const std::vector<ConfigEntry>& entries);

RunRequest request_from_entries(const std::vector<ConfigEntry>& entries);

/// FNV-1a over the effective entries.
std::uint64_t config_hash(const RunRequest& req);
std::string hash_hex(std::uint64_t h);

}  // namespace esdf
