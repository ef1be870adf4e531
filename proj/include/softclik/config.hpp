#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace softclik {

/// Key-value run configuration with "section.key" keys. The key set is fixed
/// by defaults(); parsing or setting an unknown key is an error, so typos in
/// config files fail loudly. Values are kept as strings and serialized back
/// verbatim, which makes echo() -> parse a lossless round trip.
class Config {
 public:
  static Config defaults();

  /// Parses INI-style text: [section] headers, key = value lines, '#' or ';'
  /// comments, blank lines. Starts from defaults; file values override.
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  long long get_long(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;  // comma-separated

  void set_double(const std::string& key, double v);
  void set_long(const std::string& key, long long v);
  void set_u64(const std::string& key, std::uint64_t v);
  void set_bool(const std::string& key, bool v);
  void set_list(const std::string& key, const std::vector<double>& v);

  /// Canonical text form (sections in fixed order, keys sorted); parses back
  /// to an equal Config.
  std::string echo() const;
  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace softclik
