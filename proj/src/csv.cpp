#include "gaitsim/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gaitsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return -1;
  return static_cast<int>(it - columns.begin());
}

int CsvTable::require_column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw CsvError("missing column '" + name + "'");
  return idx;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        std::string key = trim(t.substr(1, eq - 1));
        std::string value = trim(t.substr(eq + 1));
        if (!key.empty()) table.meta[key] = value;
      }
      continue;
    }
    if (!have_header) {
      table.columns = split_fields(t);
      have_header = true;
      continue;
    }
    const auto fields = split_fields(t);
    if (fields.size() != table.columns.size()) {
      throw CsvError(path + ":" + std::to_string(lineno) +
                     ": expected " + std::to_string(table.columns.size()) +
                     " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == "nan" || fields[i] == "NaN") {
        values[i] = std::nan("");
        continue;
      }
      char* end = nullptr;
      values[i] = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str() || *end != '\0') {
        throw CsvError(path + ":" + std::to_string(lineno) + ": bad number '" +
                       fields[i] + "' in column '" + table.columns[i] + "'");
      }
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) throw CsvError(path + ": empty file");
  return table;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t ncols = 0;
  bool header_written = false;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw CsvError("cannot write '" + path + "'");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::meta(const std::string& key, const std::string& value) {
  impl_->out << "# " << key << " = " << value << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  impl_->ncols = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) impl_->out << ",";
    impl_->out << columns[i];
  }
  impl_->out << "\n";
  impl_->header_written = true;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (!impl_->header_written || values.size() != impl_->ncols) {
    throw CsvError("csv row does not match header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) impl_->out << ",";
    impl_->out << format_double(values[i]);
  }
  impl_->out << "\n";
}

void CsvWriter::flush() { impl_->out.flush(); }

}  // namespace gaitsim
