#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitsim {

// Minimal numeric CSV support shared by the exporters and loaders.
// Files may start with '#'-prefixed lines; lines of the form
// "# key = value" are collected as metadata.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> meta;

  int column_index(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;
  double at(std::size_t row, int col) const { return rows[row][col]; }
};

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

CsvTable read_csv(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void meta(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void flush();

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_double(double v);  // round-trip precision

}  // namespace gaitsim
