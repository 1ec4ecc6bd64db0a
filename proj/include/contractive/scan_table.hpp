#pragma once

// Rectangular result table shared by every CLI command, with CSV and JSON
// serialization that round-trips doubles exactly.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace contractive {

using Cell = std::optional<double>;

struct ScanTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Ordered key/value pairs; keys are unique.
    std::vector<std::pair<std::string, std::string>> metadata;

    /// Non-finite values are stored as empty cells.
    void add_row(std::vector<Cell> row);
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;
    Cell at(std::size_t row, const std::string& column) const;
    std::vector<Cell> column(const std::string& name) const;

    void set_meta(const std::string& key, const std::string& value);
    std::optional<std::string> meta(const std::string& key) const;
};

enum class Format { Csv, Json };
Format parse_format(const std::string& s);

/// 17 significant digits, general notation; parses back to the same double.
std::string format_double(double v);

void write_csv(const ScanTable& t, std::ostream& os);
void write_json(const ScanTable& t, std::ostream& os);
void write_table(const ScanTable& t, std::ostream& os, Format f);

ScanTable read_csv(std::istream& is);
ScanTable read_json(std::istream& is);

}  // namespace contractive
