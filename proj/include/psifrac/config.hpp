#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace psifrac {

// Flat `section.key = value` text config; `#` starts a comment, blank lines
// are skipped, duplicate keys are errors. Every getter marks its key as
// recognized; finish() then rejects any key the command never asked about,
// so misspelled keys fail loudly instead of silently using defaults.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);  // CLI overrides

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  double require_real(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // ConfigError naming the first never-recognized key, if any.
  void finish() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> seen_;
  std::string origin_;
};

}  // namespace psifrac
