#include "entfate/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "entfate/errors.hpp"

namespace entfate::io {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("Table::add_row: wrong column count");
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("Table: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (!std::holds_alternative<double>(r[c])) {
      throw DomainError("Table: column '" + name + "' has a non-numeric cell");
    }
    out.push_back(std::get<double>(r[c]));
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
  if (std::holds_alternative<std::string>(cell)) return quote(std::get<std::string>(cell));
  return {};
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << quote(table.columns[c]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << render(row[c]);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(os, table);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace entfate::io
