#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rabies {

/// 17 significant digits; parse_double(format_double(v)) == v for finite v.
std::string format_double(double v);

/// Strict parse of a whole field; throws ConfigError on trailing garbage.
double parse_double(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; throws ConfigError if absent.
    std::size_t column(std::string_view name) const;
};

/// Comma-separated, LF-terminated. Lines starting with '#' are comments.
CsvTable read_csv(std::istream& in);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes `# <metadata>` when metadata is non-empty.
void write_metadata_line(std::ostream& out, const std::string& metadata);

} // namespace rabies
