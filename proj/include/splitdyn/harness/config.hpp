#ifndef SPLITDYN_HARNESS_CONFIG_HPP
#define SPLITDYN_HARNESS_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "../types.hpp"

namespace splitdyn {

namespace detail {

[[nodiscard]] inline std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return {};
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

}  // namespace detail

/// Flat key = value configuration with '#' comments.  Every diagnostic
/// carries the offending line number; reading tracks which keys were used so
/// misspelled keys can be rejected wholesale.
class Config {
 public:
  [[nodiscard]] static Config parse_string(const std::string& text,
                                           const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error("expected key = value, got \"" + line + "\"", line_no);
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) throw config_error("empty key", line_no);
      if (value.empty()) throw config_error("empty value for key \"" + key + "\"", line_no);
      const auto [it, fresh] = cfg.entries_.emplace(key, Entry{value, line_no});
      if (!fresh)
        throw config_error("duplicate key \"" + key + "\" (first set on line " +
                               std::to_string(it->second.line) + ")",
                           line_no);
    }
    return cfg;
  }

  [[nodiscard]] static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }

  /// Inserts or overwrites a key, e.g. for command-line overrides layered on
  /// top of a file.
  void set(const std::string& key, const std::string& value) {
    entries_[key] = Entry{value, 0};
  }

  [[nodiscard]] std::string get_string(const std::string& key) {
    return entry(key).value;
  }
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
  }

  [[nodiscard]] double get_double(const std::string& key) {
    const Entry& e = entry(key);
    char* end = nullptr;
    const double x = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
      throw config_error("key \"" + key + "\": \"" + e.value + "\" is not a number", e.line);
    return x;
  }
  [[nodiscard]] double get_double(const std::string& key, double fallback) {
    return has(key) ? get_double(key) : fallback;
  }

  [[nodiscard]] long get_long(const std::string& key) {
    const Entry& e = entry(key);
    char* end = nullptr;
    const long x = std::strtol(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
      throw config_error("key \"" + key + "\": \"" + e.value + "\" is not an integer", e.line);
    return x;
  }
  [[nodiscard]] long get_long(const std::string& key, long fallback) {
    return has(key) ? get_long(key) : fallback;
  }

  [[nodiscard]] bool get_bool(const std::string& key) {
    const Entry& e = entry(key);
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw config_error("key \"" + key + "\": \"" + e.value + "\" is not a boolean", e.line);
  }
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) {
    return has(key) ? get_bool(key) : fallback;
  }

  [[nodiscard]] int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  /// Throws if any key was never read; catches typos that would otherwise be
  /// silently ignored.
  void reject_unused() const {
    for (const auto& [key, e] : entries_)
      if (used_.count(key) == 0)
        throw config_error("unknown key \"" + key + "\"", e.line);
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  [[nodiscard]] const Entry& entry(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw config_error("missing required key \"" + key + "\"");
    used_.insert(key);
    return it->second;
  }

  std::string origin_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

}  // namespace splitdyn

#endif
