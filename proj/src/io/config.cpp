#include "motility/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "motility/numerics.hpp"

namespace motility::io {

namespace {

std::string join_lines(const std::vector<std::string>& problems) {
  std::string s = "invalid configuration:";
  for (const auto& p : problems) s += "\n  " + p;
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_lines(problems)), problems_(std::move(problems)) {}

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  std::vector<std::string> problems;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + "unterminated section header");
        continue;
      }
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!name.empty() && !valid_key(name)) {
        problems.push_back(where + "bad section name '" + std::string(name) + "'");
        continue;
      }
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected key = value");
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      problems.push_back(where + "bad key '" + std::string(key) + "'");
      continue;
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (c.entries_.count(full)) {
      problems.push_back(where + "duplicate key '" + full + "'");
      continue;
    }
    c.entries_[full] = std::string(value);
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Config::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ConfigError({"bad key '" + key + "'"});
  entries_[key] = std::move(value);
}

std::string Config::render() const {
  std::string s;
  for (const auto& [k, v] : entries_) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t Config::hash(const std::set<std::string>& exclude) const {
  std::string s;
  for (const auto& [k, v] : entries_)
    if (!exclude.count(k)) s += k + " = " + v + "\n";
  return fnv1a(s);
}

std::optional<std::string> ParamReader::raw(const std::string& key) {
  seen_.insert(key);
  return config_.find(key);
}

void ParamReader::reject(const std::string& key, const std::string& why) {
  problems_.push_back(key + ": " + why);
}

void ParamReader::accept(const std::string& key) { seen_.insert(key); }

std::optional<std::string> ParamReader::required(const std::string& key) {
  auto v = raw(key);
  if (!v) reject(key, "required");
  else resolved_.set(key, *v);
  return v;
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
  const auto v = raw(key).value_or(fallback);
  resolved_.set(key, v);
  return v;
}

std::string ParamReader::choice(const std::string& key, const std::string& fallback,
                                const std::vector<std::string>& allowed) {
  const auto v = text(key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    reject(key, "'" + v + "' is not one of {" + list + "}");
  }
  return v;
}

double ParamReader::real(const std::string& key, double fallback) {
  const auto v = raw(key);
  if (!v) {
    resolved_.set(key, format_real(fallback));
    return fallback;
  }
  const auto d = parse_double(*v);
  if (!d) {
    reject(key, "'" + *v + "' is not a finite number");
    return fallback;
  }
  resolved_.set(key, format_real(*d));
  return *d;
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback) {
  const auto v = raw(key);
  if (!v) {
    resolved_.set(key, std::to_string(fallback));
    return fallback;
  }
  const auto s = trim(*v);
  std::int64_t n = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    reject(key, "'" + *v + "' is not an integer");
    return fallback;
  }
  resolved_.set(key, std::to_string(n));
  return n;
}

bool ParamReader::boolean(const std::string& key, bool fallback) {
  const auto v = raw(key);
  if (!v) {
    resolved_.set(key, fallback ? "true" : "false");
    return fallback;
  }
  if (*v == "true" || *v == "1" || *v == "yes") {
    resolved_.set(key, "true");
    return true;
  }
  if (*v == "false" || *v == "0" || *v == "no") {
    resolved_.set(key, "false");
    return false;
  }
  reject(key, "'" + *v + "' is not a boolean (true/false)");
  return fallback;
}

std::vector<double> ParamReader::reals(const std::string& key, const std::vector<double>& fallback) {
  const auto v = raw(key);
  if (!v) {
    resolved_.set(key, format_reals(fallback));
    return fallback;
  }
  std::vector<double> out;
  for (auto item : split_list(*v)) {
    const auto d = parse_double(item);
    if (!d) {
      reject(key, "'" + std::string(item) + "' is not a finite number");
      return fallback;
    }
    out.push_back(*d);
  }
  resolved_.set(key, format_reals(out));
  return out;
}

std::vector<std::pair<double, double>> ParamReader::pairs(
    const std::string& key, const std::vector<std::pair<double, double>>& fallback) {
  auto render = [](const std::vector<std::pair<double, double>>& ps) {
    std::string s;
    for (const auto& [a, b] : ps) s += (s.empty() ? "" : ", ") + format_real(a) + ":" + format_real(b);
    return s;
  };
  const auto v = raw(key);
  if (!v) {
    resolved_.set(key, render(fallback));
    return fallback;
  }
  std::vector<std::pair<double, double>> out;
  for (auto item : split_list(*v)) {
    const auto colon = item.find(':');
    const auto a = colon == std::string_view::npos ? std::nullopt : parse_double(item.substr(0, colon));
    const auto b = colon == std::string_view::npos ? std::nullopt : parse_double(item.substr(colon + 1));
    if (!a || !b) {
      reject(key, "'" + std::string(item) + "' is not a t:F pair");
      return fallback;
    }
    out.emplace_back(*a, *b);
  }
  resolved_.set(key, render(out));
  return out;
}

void ParamReader::finish() const {
  auto problems = problems_;
  for (const auto& [k, v] : config_.entries())
    if (!seen_.count(k)) problems.push_back(k + ": unknown key");
  if (!problems.empty()) throw ConfigError(problems);
}

std::string format_real(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string format_reals(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ", ") + format_real(x);
  return s;
}

}  // namespace motility::io
