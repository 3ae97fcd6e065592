#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace sns {

// Error with file/line context for flat key=value configs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value file: one `key = value` per line, '#' comments, blank lines
// ignored.  Unknown keys are rejected by the typed loaders so typos surface
// with their line number.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::string require_string(const std::string& key) const;

  // Line number of a key (for error messages), 0 if absent.
  int line_of(const std::string& key) const;
  const std::string& path() const { return path_; }
  const std::map<std::string, std::string>& raw() const { return values_; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

 private:
  std::string path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

}  // namespace sns
