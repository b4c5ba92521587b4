#include "mccs/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mccs/errors.hpp"

namespace mccs::csv {

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw ArgumentError("cannot format number");
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

double parse_number(std::string_view field) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DataError("malformed number '" + std::string(field) + "'");
    return out;
}

std::optional<double> parse_optional(std::string_view field) {
    if (field.empty()) return std::nullopt;
    return parse_number(field);
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string join(const std::vector<std::string>& fields, char sep) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += sep;
        out += fields[i];
    }
    return out;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DataError("missing CSV column '" + std::string(name) + "'");
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != table.header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields");
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write(const std::filesystem::path& path, const Table& table) {
    std::ostringstream out;
    out << join(table.header) << '\n';
    for (const auto& row : table.rows) out << join(row) << '\n';
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError("cannot write " + path.string());
    file << out.str();
    if (!file) throw DataError("failed writing " + path.string());
}

}  // namespace mccs::csv
