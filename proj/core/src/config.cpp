#include "qfirob/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "qfirob/error.hpp"

namespace qfirob {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         !text.empty() && std::isfinite(out);
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  std::string raw;
  int line_no = 0;
  ConfigSection* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') cfg.fail_at(line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) cfg.fail_at(line_no, "empty section name");
      if (cfg.find_section(name)) {
        cfg.fail_at(line_no, "duplicate section [" + name + "]");
      }
      cfg.sections_.push_back({name, line_no, {}});
      current = &cfg.sections_.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      cfg.fail_at(line_no, "expected 'key = value'");
    }
    if (!current) cfg.fail_at(line_no, "key outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) cfg.fail_at(line_no, "empty key");
    for (const auto& e : current->entries) {
      if (e.key == key) {
        cfg.fail_at(line_no, "duplicate key '" + key + "' in [" +
                                 current->name + "] (first on line " +
                                 std::to_string(e.line) + ")");
      }
    }
    current->entries.push_back({key, value, line_no});
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, path.string() + ": cannot open config file");
  }
  return parse(in, path.string());
}

const ConfigSection* ConfigFile::find_section(std::string_view section) const {
  for (const auto& s : sections_) {
    if (s.name == section) return &s;
  }
  return nullptr;
}

bool ConfigFile::has_section(std::string_view section) const {
  return find_section(section) != nullptr;
}

int ConfigFile::section_line(std::string_view section) const {
  const auto* s = find_section(section);
  return s ? s->line : 0;
}

bool ConfigFile::has(std::string_view section, std::string_view key) const {
  const auto* s = find_section(section);
  if (!s) return false;
  return std::any_of(s->entries.begin(), s->entries.end(),
                     [&](const ConfigEntry& e) { return e.key == key; });
}

const ConfigEntry& ConfigFile::entry(std::string_view section,
                                     std::string_view key) const {
  if (const auto* s = find_section(section)) {
    for (const auto& e : s->entries) {
      if (e.key == key) return e;
    }
    fail_at(s->line, "[" + std::string(section) + "] " + std::string(key) +
                         ": required key is missing");
  }
  fail_at(0, "missing section [" + std::string(section) + "]");
}

std::string ConfigFile::get_string(std::string_view section,
                                   std::string_view key) const {
  const auto& e = entry(section, key);
  if (e.value.empty()) fail(section, key, "empty value");
  return e.value;
}

double ConfigFile::get_double(std::string_view section,
                              std::string_view key) const {
  const auto& e = entry(section, key);
  double v = 0.0;
  if (!parse_double(e.value, v)) {
    fail(section, key, "'" + e.value + "' is not a finite number");
  }
  return v;
}

std::int64_t ConfigFile::get_int(std::string_view section,
                                 std::string_view key) const {
  const auto& e = entry(section, key);
  std::int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size() ||
      e.value.empty()) {
    fail(section, key, "'" + e.value + "' is not an integer");
  }
  return v;
}

std::uint64_t ConfigFile::get_u64(std::string_view section,
                                  std::string_view key) const {
  const auto& e = entry(section, key);
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size() ||
      e.value.empty()) {
    fail(section, key, "'" + e.value + "' is not an unsigned 64-bit integer");
  }
  return v;
}

std::vector<double> ConfigFile::get_list(std::string_view section,
                                         std::string_view key) const {
  const auto& e = entry(section, key);
  std::vector<double> out;
  for (const auto part : split_commas(e.value)) {
    double v = 0.0;
    if (!parse_double(part, v)) {
      fail(section, key, "'" + std::string(part) + "' is not a finite number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> ConfigFile::get_names(std::string_view section,
                                               std::string_view key) const {
  const auto& e = entry(section, key);
  std::vector<std::string> out;
  for (const auto part : split_commas(e.value)) {
    if (part.empty()) fail(section, key, "empty name in list");
    out.emplace_back(part);
  }
  return out;
}

double ConfigFile::get_double(std::string_view section, std::string_view key,
                              double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t ConfigFile::get_int(std::string_view section,
                                 std::string_view key,
                                 std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

void ConfigFile::require_known(
    std::string_view section,
    std::initializer_list<std::string_view> allowed) const {
  const auto* s = find_section(section);
  if (!s) return;
  for (const auto& e : s->entries) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      fail(section, e.key, "unknown key");
    }
  }
}

void ConfigFile::fail(std::string_view section, std::string_view key,
                      const std::string& reason) const {
  int line = section_line(section);
  if (const auto* s = find_section(section)) {
    for (const auto& e : s->entries) {
      if (e.key == key) line = e.line;
    }
  }
  fail_at(line, "[" + std::string(section) + "] " + std::string(key) + ": " +
                    reason);
}

void ConfigFile::fail_at(int line, const std::string& reason) const {
  throw Error(ErrorKind::ConfigError,
              source_ + ":" + std::to_string(line) + ": " + reason);
}

}  // namespace qfirob
