#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tokenbal {

// Flat key-value config files: `key = value` lines, `[section]` headers that
// prefix the keys that follow, `#` comments, optional double quotes around
// string values. Scenario files and the oracle manifest share this format.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Section names in file order.
  const std::vector<std::string>& sections() const { return sections_; }
  // Keys that start with the prefix, in file order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::vector<std::string> sections_;
};

}  // namespace tokenbal
