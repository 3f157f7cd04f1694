#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nbweight {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // -1 when the column is absent
    int column(const std::string& name) const;
};

// Reads a comma-separated file with a mandatory header row. Cells are plain
// (unquoted) UTF-8; rows must all have the header's width.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Shortest-round-trip decimal formatting ('.' separator, locale independent).
std::string format_double(double value);
std::string format_int(std::int64_t value);

// Strict parsers; throw DataError with the offending cell in the message.
// parse_double rejects NaN and infinities.
double parse_double(const std::string& cell, const std::string& context = "value");
std::int64_t parse_int(const std::string& cell, const std::string& context = "value");

}  // namespace nbweight
