#pragma once

#include <Eigen/Dense>

#include <istream>
#include <string>
#include <vector>

namespace gals::io {

/// Comma-delimited text with a header row. Cells are kept as text; LF or CRLF
/// line endings; a leading UTF-8 byte-order mark is skipped. Double-quoted
/// cells are unquoted ("" escapes a quote).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Throws DataError naming the column when it is absent.
  std::size_t column_index(const std::string& name) const;

  /// Parses one column as doubles. Throws DataError with the line and column
  /// of the first cell that is not a complete decimal number.
  Eigen::VectorXd numeric_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Strict float parse of a whole cell (surrounding blanks allowed).
bool parse_double(const std::string& cell, double& out);

}  // namespace gals::io
