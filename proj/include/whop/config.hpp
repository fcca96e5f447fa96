#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace whop {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value configuration with [section] and [section.sub] headers.
/// Keys are stored as "section.key". '#' starts a comment. Values may be
/// scalars or whitespace/comma separated lists.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Keys sharing a section prefix, e.g. "domain_lambda.".
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  /// Hash of the canonicalized key/value map: insensitive to whitespace,
  /// comment text and number formatting, sensitive to every semantic field.
  std::uint64_t canonical_hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace whop
