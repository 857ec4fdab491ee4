#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace psifrac {

// Full-precision, locale-independent number text (%.17g with a forced '.'
// decimal point) so identical runs emit byte-identical files.
std::string fmt_real(double v);
std::string fmt_int(long long v);

// Line-oriented `key = value` report accumulator.
class ReportWriter {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, bool value);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// CSV with a fixed header; every row must match the column count.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t cols_;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace psifrac
