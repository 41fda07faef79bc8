#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace alpool {

// Plain-text `key = value` configuration with dotted keys, one per line;
// full-line # comments and blank lines are ignored. Every lookup marks its
// key as consumed so callers can reject misspelled keys wholesale.
class ConfigMap {
 public:
  ConfigMap() = default;
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text, const std::string& origin);

  // Inserts or replaces (used for flag overrides). Overridden keys count as
  // consumed only once re-read.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Space-separated non-negative integers; key must be present.
  std::vector<std::size_t> get_size_list(const std::string& key) const;

  // Keys that were set but never read — misspellings, typically.
  std::vector<std::string> unconsumed_keys() const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    mutable bool consumed = false;
  };
  const Entry* find(const std::string& key) const;
  std::string where(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  std::string origin_ = "<config>";
};

}  // namespace alpool
