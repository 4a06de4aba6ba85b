#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ncbcast {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
std::string format_number(std::uint64_t value);
/// Throws std::invalid_argument unless the whole string is a number.
double parse_number(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Builds one row from mixed cells.
class CsvRow {
 public:
  CsvRow& operator<<(std::string_view text) {
    cells_.emplace_back(text);
    return *this;
  }
  CsvRow& operator<<(double value) {
    cells_.push_back(format_number(value));
    return *this;
  }
  CsvRow& operator<<(std::uint64_t value) {
    cells_.push_back(format_number(value));
    return *this;
  }
  CsvRow& operator<<(unsigned value) { return *this << static_cast<std::uint64_t>(value); }

  std::vector<std::string> take() { return std::move(cells_); }

 private:
  std::vector<std::string> cells_;
};

/// RFC 4180 style: cells holding commas, quotes or newlines are quoted.
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);
/// Throws std::runtime_error on malformed input or ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);
/// Throws std::runtime_error when the file cannot be written.
void write_csv_file(const std::string& path, const CsvTable& table);

}  // namespace ncbcast
