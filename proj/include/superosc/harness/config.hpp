#pragma once

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace superosc::harness {

/// Missing or malformed configuration; carries the offending field and, when
/// known, its line in the source file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Flat INI file: [section] blocks of key = value.  Keys are addressed as
/// "section.key".
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(std::istream& in, const std::string& source = "<string>");

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> maybe_number(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key);
  /// (key, value) pairs under `section`, in file order; keys may contain dots.
  std::vector<std::pair<std::string, std::string>> entries(const std::string& section) const;

  /// Throws ConfigError for any key not in `allowed` ("section.key" or "section.*").
  void require_known(const std::set<std::string>& allowed) const;

  /// Sorted {section: {key: value}} view; independent of key order in the file.
  nlohmann::json canonical() const;
  /// FNV-1a 64 of canonical().dump(), as 16 hex digits.
  std::string hash() const;

  const std::string& source() const { return source_; }
  int line_of(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  boost::property_tree::ptree tree_;
  std::map<std::string, int> lines_;
  std::string source_;
};

std::string fnv1a_hex(const std::string& bytes);

}  // namespace superosc::harness
