#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace qfd::cli {

/// Sectioned key=value settings with provenance tracking. Every value read
/// (including defaults) is recorded so outputs can echo the effective
/// configuration; keys that were never read are reported as unknown.
class Settings {
 public:
  using Entries = std::vector<std::pair<std::string, std::string>>;

  /// Throws ConfigError if the file cannot be read or parsed, or if a key
  /// sits outside any section.
  static Settings from_file(const std::string& path);

  /// Sets a value, replacing any existing one (command-line overrides).
  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  /// Required lookups throw ConfigError "<key>: required".
  std::string text(const std::string& section, const std::string& key);
  std::string text(const std::string& section, const std::string& key, const std::string& fallback);
  double number(const std::string& section, const std::string& key);
  double number(const std::string& section, const std::string& key, double fallback);
  int integer(const std::string& section, const std::string& key, int fallback);
  std::string choice(const std::string& section, const std::string& key,
                     const std::vector<std::string>& allowed, const std::string& fallback);

  /// Throws ConfigError naming the first key that no lookup consumed.
  void reject_unused() const;

  /// Values read so far, grouped by section in canonical order.
  std::vector<std::pair<std::string, Entries>> effective() const;

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& value);

  boost::property_tree::ptree tree_;
  std::map<std::string, Entries> used_;
};

/// Shortest round-trip decimal form, used for every number written out.
std::string format_number(double v);

}  // namespace qfd::cli
