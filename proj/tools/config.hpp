#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdlab::cli {

/// Parse or validation failure; the message names the file, line and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key = value" configuration with '#' comments. Every key must
/// be registered in the default table; values are parsed on access.
class Config {
 public:
  /// Defaults only.
  Config();

  static Config parse(std::istream& in, const std::string& source);
  static Config load(const std::string& path);

  /// "key=value"; the key must be known.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value, const std::string& where = "");

  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  bool flag(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  static const std::map<std::string, std::string>& defaults();

 private:
  const std::string& raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

/// Numeric literal, "pi", or a product/quotient with pi ("2*pi", "pi/2").
double parse_number(const std::string& text);

}  // namespace rdlab::cli
