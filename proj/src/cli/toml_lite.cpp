#include "ksmooth/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "ksmooth/common.hpp"

namespace ksmooth {
namespace {

class LineParser {
 public:
  LineParser(const std::string& s, std::size_t line) : s_(s), line_(line) {}

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::SchemaError, "config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#' || s_[pos_] == '\r';
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return basic_string();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-' || s_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) error("expected a key");
    return s_.substr(start, pos_ - start);
  }

  TomlValue value() {
    skip_ws();
    if (peek() == '[') {
      ++pos_;
      std::vector<TomlValue::Scalar> items;
      for (;;) {
        skip_ws();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        items.push_back(scalar());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          error("expected ',' or ']' in array");
        }
      }
      return {items};
    }
    TomlValue v;
    std::visit([&](auto&& x) { v.data = x; }, scalar());
    return v;
  }

 private:
  TomlValue::Scalar scalar() {
    skip_ws();
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') {
      const std::size_t end = s_.find('\'', pos_ + 1);
      if (end == std::string::npos) error("unterminated literal string");
      std::string r = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return r;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t' && s_[pos_] != '\r')
      ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits += ch;
    if (digits.empty()) error("expected a value");
    const bool floaty = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
    if (!floaty) {
      std::int64_t i = 0;
      const char* b = digits.data() + (digits[0] == '+' ? 1 : 0);
      const auto [p, ec] = std::from_chars(b, digits.data() + digits.size(), i);
      if (ec == std::errc() && p == digits.data() + digits.size()) return i;
    }
    double d = 0.0;
    const char* b = digits.data() + (digits[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(b, digits.data() + digits.size(), d);
    if (ec != std::errc() || p != digits.data() + digits.size()) error("cannot parse value '" + tok + "'");
    return d;
  }

  std::string basic_string() {
    ++pos_;
    std::string r;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char ch = s_[pos_++];
      if (ch == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': ch = '\n'; break;
          case 't': ch = '\t'; break;
          case '"': ch = '"'; break;
          case '\\': ch = '\\'; break;
          default: error(std::string("unsupported escape \\") + e);
        }
      }
      r += ch;
    }
    if (pos_ >= s_.size()) error("unterminated string");
    ++pos_;
    return r;
  }

  const std::string& s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

[[noreturn]] void wrong_type(const std::string& key, const char* want) {
  fail(ErrorKind::SchemaError, "config key '" + key + "' must be " + want);
}

}  // namespace

double TomlValue::as_double(const std::string& key) const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&data)) return *d;
  wrong_type(key, "a number");
}

std::int64_t TomlValue::as_int(const std::string& key) const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return *i;
  wrong_type(key, "an integer");
}

bool TomlValue::as_bool(const std::string& key) const {
  if (const auto* b = std::get_if<bool>(&data)) return *b;
  wrong_type(key, "a boolean");
}

const std::string& TomlValue::as_string(const std::string& key) const {
  if (const auto* s = std::get_if<std::string>(&data)) return *s;
  wrong_type(key, "a string");
}

std::vector<double> TomlValue::as_double_list(const std::string& key) const {
  const auto* arr = std::get_if<std::vector<Scalar>>(&data);
  if (!arr) wrong_type(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& s : *arr) {
    if (const auto* i = std::get_if<std::int64_t>(&s))
      out.push_back(static_cast<double>(*i));
    else if (const auto* d = std::get_if<double>(&s))
      out.push_back(*d);
    else
      wrong_type(key, "an array of numbers");
  }
  return out;
}

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string line, prefix;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    LineParser p(line, lineno);
    if (p.at_end_or_comment()) continue;
    if (p.peek() == '[') {
      p.expect('[');
      prefix = p.key() + ".";
      p.expect(']');
      if (!p.at_end_or_comment()) p.error("unexpected text after table header");
      continue;
    }
    const std::string key = prefix + p.key();
    p.expect('=');
    TomlValue v = p.value();
    if (!p.at_end_or_comment()) p.error("unexpected text after value");
    if (!table.emplace(key, std::move(v)).second) p.error("duplicate key '" + key + "'");
  }
  return table;
}

}  // namespace ksmooth
