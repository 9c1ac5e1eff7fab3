#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdr::csv {

/// Full-precision decimal rendering (17 significant digits round-trips
/// doubles exactly).
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& columns)
      : out_(path), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != n_columns_)
      throw std::logic_error("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << fmt(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  size_t n_columns_;
};

}  // namespace cdr::csv
