#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace docqual {

// Key-value configuration. Files hold one `key = value` pair per line with
// `#` comments. Precedence: CLI flag > config file > built-in default.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  // Applies `other` on top of this config (used for CLI overrides).
  void overlay(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws ConfigError listing any key not in `allowed`.
  void reject_unknown_keys(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  std::string dump() const;  // canonical `key = value` lines, sorted

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace docqual
