#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "samp/bench.hpp"

namespace samp {

/// One `key = value` line, qualified by the `[section]` it appeared under.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;  // 0 for command-line overrides

  std::string qualified() const { return section + "." + key; }
};

/// Flat key=value text with `[section]` headers. `#` and `;` start comments.
std::vector<ConfigEntry> parse_config(std::istream& in);
std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path);

/// `section.key=value`, as given to `--set`.
ConfigEntry parse_override(const std::string& text);

/// Applies entries in order; later entries win. Unknown keys and bad values
/// throw InvalidArgument naming the key.
void apply_config(ExperimentConfig& config, const std::vector<ConfigEntry>& entries);

/// Every accepted key with its default, one per line.
std::string config_reference();

}  // namespace samp
