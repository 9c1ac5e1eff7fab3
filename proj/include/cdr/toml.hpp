#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdr::toml {

/// Minimal strict TOML subset: flat `key = value` pairs with comments, basic
/// strings, numbers, booleans and one-line arrays of numbers. Tables and
/// multi-line constructs are rejected with a clear message.
struct Value {
  enum class Kind { String, Number, Boolean, Array };
  Kind kind = Kind::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<double> array;
  int line = 0;
};

using Table = std::map<std::string, Value>;

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace cdr::toml
