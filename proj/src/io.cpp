#include "psifrac/io.hpp"

#include <cstdio>
#include <fstream>

#include "psifrac/errors.hpp"

namespace psifrac {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Guard against a non-C locale sneaking in a comma decimal separator.
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

std::string fmt_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

void ReportWriter::add(const std::string& key, const std::string& value) {
  text_ += key;
  text_ += " = ";
  text_ += value;
  text_ += '\n';
}

void ReportWriter::add(const std::string& key, double value) { add(key, fmt_real(value)); }
void ReportWriter::add(const std::string& key, long long value) { add(key, fmt_int(value)); }
void ReportWriter::add(const std::string& key, bool value) {
  add(key, std::string(value ? "true" : "false"));
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : cols_(columns.size()) {
  if (columns.empty()) throw ParamError("csv writer: need at least one column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += columns[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != cols_)
    throw ParamError("csv writer: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(fmt_real(v));
  add_row(s);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("short write to output file: " + path);
}

}  // namespace psifrac
