#include "psifrac/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "psifrac/errors.hpp"

namespace psifrac {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_'))
      return false;
  return true;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected `key = value`, got `" + line + "`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad key `" + key + "`");
    if (value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for `" +
                        key + "`");
    if (!cfg.kv_.emplace(key, value).second)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key `" + key +
                        "`");
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

bool Config::has(const std::string& key) const {
  seen_.insert(key);
  return kv_.count(key) != 0;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("bad override key `" + key + "`");
  kv_[key] = value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  seen_.insert(key);
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  seen_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing required config key `" + key + "`");
  return it->second;
}

double Config::get_real(const std::string& key, double fallback) const {
  seen_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (errno != 0 || end == it->second.c_str() || *end != '\0')
    throw ConfigError("config key `" + key + "`: not a number: `" + it->second + "`");
  return v;
}

double Config::require_real(const std::string& key) const {
  seen_.insert(key);
  if (!kv_.count(key)) throw ConfigError("missing required config key `" + key + "`");
  return get_real(key, 0.0);
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_real(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config key `" + key + "`: expected an integer");
  return i;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  seen_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (errno != 0 || end == it->second.c_str() || *end != '\0')
    throw ConfigError("config key `" + key + "`: not an unsigned integer: `" + it->second +
                      "`");
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  seen_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key `" + key + "`: expected a boolean, got `" + v + "`");
}

void Config::finish() const {
  for (const auto& [key, value] : kv_)
    if (!seen_.count(key))
      throw ConfigError("unknown config key `" + key + "` in " + origin_);
}

}  // namespace psifrac
