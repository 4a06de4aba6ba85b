#include "ncbcast/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ncbcast {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  return parse_number(rows.at(row).at(column(name)));
}

namespace {

void write_cell(std::ostream& out, const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) {
    out << cell;
    return;
  }
  out << '"';
  for (char c : cell) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    write_cell(out, cells[i]);
  }
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_line(out, table.header);
  for (const auto& row : table.rows) write_line(out, row);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool any = false;  // current line has content
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        cells.push_back(std::move(cell));
        cell.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !cell.empty()) {
          cells.push_back(std::move(cell));
          lines.push_back(std::move(cells));
        }
        cells.clear();
        cell.clear();
        any = false;
        break;
      default:
        cell += c;
        any = true;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV cell");
  if (any || !cell.empty()) {
    cells.push_back(std::move(cell));
    lines.push_back(std::move(cells));
  }

  CsvTable table;
  if (lines.empty()) return table;
  table.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != table.header.size()) {
      throw std::runtime_error("CSV row " + std::to_string(i) + " has " +
                               std::to_string(lines[i].size()) + " cells, header has " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(lines[i]));
  }
  return table;
}

CsvTable read_csv(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, table);
  out.flush();
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

}  // namespace ncbcast
