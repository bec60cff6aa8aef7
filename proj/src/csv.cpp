#include "mlirl/csv.hpp"

#include "mlirl/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>

namespace mlirl {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(std::string_view token) {
    const std::string s(token);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    // ERANGE on underflow still yields the correct subnormal.
    if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
        throw IoError("cannot parse number '" + s + "'");
    }
    return v;
}

long long parse_integer(std::string_view token) {
    const std::string s(token);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw IoError("cannot parse integer '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IoError("missing CSV column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV input");
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != table.header.size()) {
            throw IoError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

} // namespace mlirl
