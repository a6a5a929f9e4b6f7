#include "superosc/harness/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace superosc::harness {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& what, std::string field, int line)
    : std::runtime_error(what), field_(std::move(field)), line_(line) {}

namespace {

double parse_double(const std::string& raw, bool& ok) {
  const std::string s = boost::algorithm::trim_copy(raw);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  ok = ec == std::errc() && ptr == end && std::isfinite(v);
  return v;
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", {}, 0);
  return parse(in, path);
}

Config Config::parse(std::istream& in, const std::string& source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  Config c;
  c.source_ = source;
  std::istringstream for_tree(text);
  try {
    pt::read_ini(for_tree, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message(), {},
                      static_cast<int>(e.line()));
  }

  // Line numbers for diagnostics only; the tree above is authoritative.
  std::istringstream lines(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const std::string t = boost::algorithm::trim_copy(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = boost::algorithm::trim_copy(t.substr(1, t.size() - 2));
      continue;
    }
    if (const auto eq = t.find('='); eq != std::string::npos)
      c.lines_[section + "." + boost::algorithm::trim_copy(t.substr(0, eq))] = number;
  }
  for (const auto& [name, node] : c.tree_)
    if (node.empty() && !node.data().empty())
      throw ConfigError(source + ": key '" + name + "' must sit inside a [section]", name,
                        c.line_of("." + name));
  return c;
}

int Config::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const int line = line_of(key);
  std::string where = source_;
  if (line > 0) where += ":" + std::to_string(line);
  throw ConfigError(where + ": " + key + ": " + message, key, line);
}

bool Config::has(const std::string& key) const {
  return static_cast<bool>(tree_.get_optional<std::string>(key));
}

std::string Config::text(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(key);
  if (!v) fail(key, "required field is missing");
  return boost::algorithm::trim_copy(*v);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const {
  bool ok = false;
  const double v = parse_double(text(key), ok);
  if (!ok) fail(key, "expected a finite number, got '" + text(key) + "'");
  return v;
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> Config::maybe_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

long Config::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string s = text(key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
  return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = boost::algorithm::to_lower_copy(text(key));
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  fail(key, "expected true/false, got '" + s + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<std::string> parts;
  const std::string s = text(key);
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    bool ok = false;
    out.push_back(parse_double(p, ok));
    if (!ok) fail(key, "expected a comma-separated list of numbers, got '" + s + "'");
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

void Config::erase(const std::string& key) {
  const auto dot = key.find('.');
  if (auto child = tree_.get_child_optional(key.substr(0, dot)))
    child->erase(key.substr(dot + 1));
}

std::vector<std::pair<std::string, std::string>> Config::entries(const std::string& section) const {
  std::vector<std::pair<std::string, std::string>> out;
  if (auto child = tree_.get_child_optional(section))
    for (const auto& [name, node] : *child)
      out.emplace_back(name, boost::algorithm::trim_copy(node.data()));
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [section, node] : tree_) {
    if (allowed.count(section + ".*")) continue;
    for (const auto& [name, value] : node) {
      const std::string key = section + "." + name;
      if (!allowed.count(key)) fail(key, "unknown field");
    }
  }
}

nlohmann::json Config::canonical() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, node] : tree_)
    for (const auto& [name, value] : node)
      j[section][name] = boost::algorithm::trim_copy(value.data());
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016" PRIx64, h);
  return out;
}

std::string Config::hash() const { return fnv1a_hex(canonical().dump()); }

}  // namespace superosc::harness
