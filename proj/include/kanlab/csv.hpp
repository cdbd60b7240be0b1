#pragma once

#include <string>
#include <vector>

namespace kanlab {

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

/// Minimal CSV table: one header row plus string cells. Numeric cells are
/// written via format_double by the emitters that build tables.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(const std::string& path) const;
    static CsvTable read(const std::string& path);

    std::size_t column(const std::string& name) const;
};

} // namespace kanlab
