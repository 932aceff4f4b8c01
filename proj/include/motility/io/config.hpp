#pragma once

// Flat key = value configuration.
//
//   # comment            (also after a value: "beta = 150  # fast")
//   [section]            prefixes following keys with "section."
//   []                   back to the top level
//   key.sub = value      dotted keys are the same as keys under [key]
//
// Keys match [A-Za-z0-9_.-]+. Values are the trimmed rest of the line.
// A repeated key is an error.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace motility::io {

/// Invalid configuration; what() lists every problem, one per line.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> find(const std::string& key) const;
  void set(const std::string& key, std::string value);
  void erase(const std::string& key) { entries_.erase(key); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Sorted "key = value" lines.
  std::string render() const;
  /// FNV-1a of render() without the keys in `exclude`.
  std::uint64_t hash(const std::set<std::string>& exclude = {}) const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Typed access with defaults. Every read key (and its default) goes into
/// resolved(); finish() throws ConfigError for bad values and unread keys.
class ParamReader {
 public:
  explicit ParamReader(const Config& config) : config_(config) {}

  std::string text(const std::string& key, const std::string& fallback);
  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed);
  double real(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  /// Comma-separated reals.
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  /// Comma-separated "t:F" pairs.
  std::vector<std::pair<double, double>> pairs(const std::string& key,
                                               const std::vector<std::pair<double, double>>& fallback);
  /// Required key without default.
  std::optional<std::string> required(const std::string& key);

  /// Records a problem with the value of `key`.
  void reject(const std::string& key, const std::string& why);
  bool present(const std::string& key) const { return config_.has(key); }
  /// Marks a key as known without reading it.
  void accept(const std::string& key);

  void finish() const;
  const Config& resolved() const { return resolved_; }

 private:
  std::optional<std::string> raw(const std::string& key);

  const Config& config_;
  Config resolved_;
  std::set<std::string> seen_;
  std::vector<std::string> problems_;
};

/// Shortest text that reads back to the same double.
std::string format_real(double x);
std::string format_reals(const std::vector<double>& xs);

}  // namespace motility::io
