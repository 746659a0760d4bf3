#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace msci::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads comma-separated text with an obligatory header line. Double-quoted
/// fields may contain commas, quotes ("") and newlines. Blank lines are
/// skipped; a UTF-8 byte-order mark at the start is dropped.
Table read(std::istream& in);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
/// Strict decimal parse; leading/trailing blanks are ignored.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace msci::csv
