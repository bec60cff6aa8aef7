#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mlirl {

/// Shortest-safe decimal text: 17 significant digits, round-trips every double.
std::string format_double(double value);

/// Strict parse of a full token; throws IoError on trailing garbage.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

/// Splits on commas (no quoting; none of our fields contain commas).
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

} // namespace mlirl
