#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace ksmooth {

/// Minimal TOML reader: `[table]` headers, `key = value` pairs, `#` comments,
/// basic and literal strings, integers, floats, booleans, and single-line
/// arrays of scalars. Keys inside tables come back dotted ("table.key").
struct TomlValue {
  using Scalar = std::variant<bool, std::int64_t, double, std::string>;
  std::variant<bool, std::int64_t, double, std::string, std::vector<Scalar>> data;

  bool is_number() const { return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data); }
  double as_double(const std::string& key) const;
  std::int64_t as_int(const std::string& key) const;
  bool as_bool(const std::string& key) const;
  const std::string& as_string(const std::string& key) const;
  std::vector<double> as_double_list(const std::string& key) const;
};

using TomlTable = std::map<std::string, TomlValue>;

/// Throws SchemaError with the line number on malformed input.
TomlTable parse_toml(const std::string& text);

}  // namespace ksmooth
