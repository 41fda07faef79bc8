#include "alpool/configfile.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "alpool/util.hpp"

namespace alpool {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
  ConfigMap map;
  map.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(strfmt("%s:%zu: expected 'key = value', found '%s'", origin.c_str(), lineno,
                  stripped.c_str()));
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      fail(strfmt("%s:%zu: empty key", origin.c_str(), lineno));
    if (map.entries_.count(key))
      fail(strfmt("%s:%zu: duplicate key '%s' (first set on line %zu)", origin.c_str(),
                  lineno, key.c_str(), map.entries_[key].line));
    map.entries_[key] = Entry{value, lineno, false};
  }
  return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(strfmt("cannot open config file '%s'", path.c_str()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0, false};
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) > 0; }

const ConfigMap::Entry* ConfigMap::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.consumed = true;
  return &it->second;
}

std::string ConfigMap::where(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it != entries_.end() && it->second.line > 0)
    return strfmt("%s:%zu", origin_.c_str(), it->second.line);
  return origin_;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  double v = 0.0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end)
    fail(strfmt("%s: key '%s': '%s' is not a number", where(key).c_str(), key.c_str(),
                e->value.c_str()));
  return v;
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end)
    fail(strfmt("%s: key '%s': '%s' is not a non-negative integer", where(key).c_str(),
                key.c_str(), e->value.c_str()));
  return v;
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(strfmt("%s: key '%s': '%s' is not a boolean (true/false)", where(key).c_str(),
              key.c_str(), e->value.c_str()));
}

std::vector<std::size_t> ConfigMap::get_size_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) fail(strfmt("%s: missing required key '%s'", origin_.c_str(), key.c_str()));
  std::vector<std::size_t> out;
  std::istringstream ss(e->value);
  std::string token;
  while (ss >> token) {
    std::size_t v = 0;
    const char* b = token.data();
    const char* end = b + token.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end)
      fail(strfmt("%s: key '%s': '%s' is not a non-negative integer",
                  where(key).c_str(), key.c_str(), token.c_str()));
    out.push_back(v);
  }
  if (out.empty())
    fail(strfmt("%s: key '%s' must list at least one integer", where(key).c_str(),
                key.c_str()));
  return out;
}

std::vector<std::string> ConfigMap::unconsumed_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_)
    if (!entry.consumed) out.push_back(key);
  return out;
}

}  // namespace alpool
