#include "rabies/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "rabies/errors.hpp"

namespace rabies {

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw Error("failed to format number");
    }
    return std::string(buf, end);
}

double parse_double(std::string_view text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ConfigError("missing CSV column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) {
        throw ConfigError("CSV input has no header row");
    }
    return table;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out << ',';
        }
        out << fields[i];
    }
    out << '\n';
}

void write_metadata_line(std::ostream& out, const std::string& metadata)
{
    if (!metadata.empty()) {
        out << "# " << metadata << '\n';
    }
}

} // namespace rabies
