#pragma once

// INI-style key/value files: `[section]` headers, `key = value` lines, and
// `#` or `;` comments. Every value keeps its line number so diagnostics can
// point at the offending key.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qfirob {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;
};

// Accessors throw ConfigError as "<source>:<line>: [section] key: reason".
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, std::string source);
  static ConfigFile load(const std::filesystem::path& path);

  const std::string& source() const noexcept { return source_; }
  const std::vector<ConfigSection>& sections() const noexcept {
    return sections_;
  }
  bool has_section(std::string_view section) const;
  bool has(std::string_view section, std::string_view key) const;
  const ConfigEntry& entry(std::string_view section, std::string_view key) const;
  int section_line(std::string_view section) const;

  std::string get_string(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key) const;
  std::int64_t get_int(std::string_view section, std::string_view key) const;
  std::uint64_t get_u64(std::string_view section, std::string_view key) const;
  // Comma-separated reals.
  std::vector<double> get_list(std::string_view section,
                               std::string_view key) const;
  // Comma-separated names.
  std::vector<std::string> get_names(std::string_view section,
                                     std::string_view key) const;

  double get_double(std::string_view section, std::string_view key,
                    double fallback) const;
  std::int64_t get_int(std::string_view section, std::string_view key,
                       std::int64_t fallback) const;

  // Rejects keys outside `allowed` in `section`.
  void require_known(std::string_view section,
                     std::initializer_list<std::string_view> allowed) const;

  [[noreturn]] void fail(std::string_view section, std::string_view key,
                         const std::string& reason) const;
  [[noreturn]] void fail_at(int line, const std::string& reason) const;

 private:
  const ConfigSection* find_section(std::string_view section) const;

  std::string source_;
  std::vector<ConfigSection> sections_;
};

}  // namespace qfirob
