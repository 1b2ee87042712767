#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace entfate::io {

// Empty cell, number, or text.
using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  // Column values as doubles; throws when a cell is not numeric.
  std::vector<double> column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;
};

// %.17g, which round-trips; both signed zeros print as "0".
std::string format_double(double v);

// RFC 4180: comma separated, CRLF-free ("\n") lines, header row first,
// fields quoted only when they contain a comma, quote or newline.
void write_csv(std::ostream& os, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);

}  // namespace entfate::io
