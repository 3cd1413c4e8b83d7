#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace anchor {

// Header row plus string cells, as read from disk before any typing.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;  // throws if absent
  bool has_column(const std::string& name) const;
};

// Comma-separated with optional double-quote quoting; no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line);

RawTable read_raw_csv(const std::string& path);

// 17 significant digits: enough for an exact double round trip.
std::string format_double(double v);

// "", "NA", "NaN", "nan", "NULL" are treated as missing observations.
bool is_missing_token(const std::string& cell);

// Strict double parse; throws std::runtime_error naming the cell contents.
double parse_double(const std::string& cell);

}  // namespace anchor
