#include "gals/csv.hpp"

#include "gals/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gals::io {

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw DataError("unterminated quote on line " + std::to_string(line_no));
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto cells = split_line(line, line_no);
    if (!have_header) {
      for (auto& c : cells) c = trim(c);
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw DataError("CSV input is empty (header row required)");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_csv(in);
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError("column '" + name + "' not found in CSV header");
}

Eigen::VectorXd CsvTable::numeric_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double v = 0.0;
    if (!parse_double(rows[i][j], v)) {
      std::ostringstream os;
      os << "non-numeric value '" << rows[i][j] << "' at line " << line_numbers[i] << ", column '"
         << name << "' (" << j + 1 << ")";
      throw DataError(os.str());
    }
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

}  // namespace gals::io
