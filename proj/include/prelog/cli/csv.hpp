#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace prelog::cli {

/// 12 significant digits ("%.12g"); negative zero prints as "0".
std::string format_number(double value);

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string quote_field(std::string_view field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Header plus rows, CRLF line endings.
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace prelog::cli
