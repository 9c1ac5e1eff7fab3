#include "cdr/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cdr::toml {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a basic string.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

double parse_number(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError(line, "empty value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ParseError(line, "malformed number '" + t + "'");
  if (!std::isfinite(v))
    throw ParseError(line, "non-finite number '" + t + "'");
  return v;
}

Value parse_value(const std::string& raw, int line) {
  const std::string t = trim(raw);
  Value v;
  v.line = line;
  if (t.empty()) throw ParseError(line, "missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ParseError(line, "unterminated string");
    v.kind = Value::Kind::String;
    v.str = t.substr(1, t.size() - 2);
    if (v.str.find('"') != std::string::npos)
      throw ParseError(line, "embedded quote in string");
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = Value::Kind::Boolean;
    v.boolean = (t == "true");
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']')
      throw ParseError(line, "array must open and close on one line");
    v.kind = Value::Kind::Array;
    const std::string inner = t.substr(1, t.size() - 2);
    std::string item;
    std::istringstream stream(inner);
    while (std::getline(stream, item, ',')) {
      if (trim(item).empty()) continue;
      v.array.push_back(parse_number(item, line));
    }
    return v;
  }
  v.kind = Value::Kind::Number;
  v.num = parse_number(t, line);
  return v;
}

}  // namespace

Table parse(const std::string& text) {
  Table table;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[')
      throw ParseError(line_no,
                       "tables are not supported; use flat keys only");
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ParseError(line_no, "invalid key '" + key + "'");
    if (table.count(key))
      throw ParseError(line_no, "duplicate key '" + key + "'");
    table[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace cdr::toml
