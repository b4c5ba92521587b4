#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mccs::csv {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double x);
std::string format_optional(const std::optional<double>& x);

double parse_number(std::string_view field);
/// Empty field means absent.
std::optional<double> parse_optional(std::string_view field);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string join(const std::vector<std::string>& fields, char sep = ',');

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws DataError if missing.
    std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated file with a header row. Every row must have the
/// header's width.
Table read(const std::filesystem::path& path);

/// Writes header + rows with '\n' line endings.
void write(const std::filesystem::path& path, const Table& table);

}  // namespace mccs::csv
