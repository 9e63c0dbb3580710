#pragma once

// Deterministic CSV output: fixed column order, %.17g number formatting, so
// identical configs and seeds reproduce byte-identical files.

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace overdamp {

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path), columns_(columns) {
    if (!out_) throw std::runtime_error("cannot open csv file: " + path);
    for (std::size_t i = 0; i < columns_.size(); ++i)
      out_ << (i ? "," : "") << columns_[i];
    out_ << "\n";
  }

  void row(std::span<const double> values) {
    if (values.size() != columns_.size())
      throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << csv_num(values[i]);
    out_ << "\n";
  }

  void row_text(std::span<const std::string> values) {
    if (values.size() != columns_.size())
      throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << values[i];
    out_ << "\n";
  }

  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::vector<std::string> columns_;
};

}  // namespace overdamp
