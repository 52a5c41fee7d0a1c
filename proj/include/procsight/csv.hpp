#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace procsight::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a delimited UTF-8 table with a mandatory header row.
/// Fields may be double-quoted; embedded quotes are escaped by doubling.
/// Rows shorter than the header are padded with empty fields.
Table read(std::istream& in, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace procsight::csv
