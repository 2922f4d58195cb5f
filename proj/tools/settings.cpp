#include "settings.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "qfd/common.hpp"

namespace qfd::cli {

namespace pt = boost::property_tree;

namespace {

const std::array<std::string, 5> kSectionOrder{"phys", "grid", "solver", "scenario", "output"};

pt::ptree::path_type path_of(const std::string& section, const std::string& key) {
  // '/' never appears in keys, so dotted names stay intact.
  return pt::ptree::path_type(section + "/" + key, '/');
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

Settings Settings::from_file(const std::string& path) {
  Settings s;
  try {
    pt::read_ini(path, s.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.message().empty() ? "cannot read" : e.message()));
  }
  for (const auto& [name, child] : s.tree_) {
    if (child.empty()) {
      throw ConfigError(fmt::format("{}: key outside any section", name));
    }
  }
  return s;
}

void Settings::set(const std::string& section, const std::string& key, const std::string& value) {
  tree_.put(path_of(section, key), value);
}

bool Settings::has(const std::string& section, const std::string& key) const {
  return raw(section, key).has_value();
}

std::optional<std::string> Settings::raw(const std::string& section, const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(path_of(section, key));
  if (!v) return std::nullopt;
  return trimmed(*v);
}

void Settings::record(const std::string& section, const std::string& key, const std::string& value) {
  auto& entries = used_[section];
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const auto& e) { return e.first == key; });
  if (it == entries.end()) {
    entries.emplace_back(key, value);
  } else {
    it->second = value;
  }
}

std::string Settings::text(const std::string& section, const std::string& key) {
  const auto v = raw(section, key);
  if (!v || v->empty()) throw ConfigError(fmt::format("{}: required (section [{}])", key, section));
  record(section, key, *v);
  return *v;
}

std::string Settings::text(const std::string& section, const std::string& key,
                           const std::string& fallback) {
  const auto v = raw(section, key);
  const std::string value = (v && !v->empty()) ? *v : fallback;
  record(section, key, value);
  return value;
}

double Settings::number(const std::string& section, const std::string& key) {
  const std::string s = text(section, key);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: expected a finite number, got '{}'", key, s));
  }
  return v;
}

double Settings::number(const std::string& section, const std::string& key, double fallback) {
  if (!has(section, key)) {
    record(section, key, format_number(fallback));
    return fallback;
  }
  return number(section, key);
}

int Settings::integer(const std::string& section, const std::string& key, int fallback) {
  if (!has(section, key)) {
    record(section, key, std::to_string(fallback));
    return fallback;
  }
  const std::string s = text(section, key);
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, s));
  }
  return v;
}

std::string Settings::choice(const std::string& section, const std::string& key,
                             const std::vector<std::string>& allowed, const std::string& fallback) {
  const std::string v = text(section, key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    throw ConfigError(
        fmt::format("{}: expected one of {{{}}}, got '{}'", key, fmt::join(allowed, ", "), v));
  }
  return v;
}

void Settings::reject_unused() const {
  for (const auto& [section, child] : tree_) {
    const auto it = used_.find(section);
    for (const auto& [key, value] : child) {
      const bool seen = it != used_.end() &&
                        std::any_of(it->second.begin(), it->second.end(),
                                    [&](const auto& e) { return e.first == key; });
      if (!seen) {
        throw ConfigError(fmt::format("{}: unknown key in section [{}]", key, section));
      }
    }
  }
}

std::vector<std::pair<std::string, Settings::Entries>> Settings::effective() const {
  std::vector<std::pair<std::string, Entries>> out;
  for (const auto& name : kSectionOrder) {
    const auto it = used_.find(name);
    if (it != used_.end()) out.emplace_back(name, it->second);
  }
  for (const auto& [name, entries] : used_) {
    if (std::find(kSectionOrder.begin(), kSectionOrder.end(), name) == kSectionOrder.end()) {
      out.emplace_back(name, entries);
    }
  }
  return out;
}

}  // namespace qfd::cli
