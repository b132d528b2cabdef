#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wmp {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row has header.size() cells
};

// Splits one line on commas. No quoting support: the formats handled here
// never contain embedded commas. A trailing '\r' is stripped.
std::vector<std::string> split_csv_line(const std::string& line);

// Reads an entire CSV stream. Every data row must have exactly as many cells
// as the header; otherwise throws ValidationError naming the offending line.
CsvTable read_csv(std::istream& in, const std::string& what);

// Round-trip-exact decimal rendering of a double ("%.17g" trimmed to the
// shortest representation that parses back to the same value).
std::string format_double(double v);

// Parses a decimal real. Returns nullopt for anything that is not a full
// numeric token. Case-insensitive "nan" parses as a quiet NaN.
std::optional<double> parse_double(const std::string& cell);

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace wmp
