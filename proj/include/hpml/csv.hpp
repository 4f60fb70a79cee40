#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hpml::csv {

// A parsed CSV document: one vector of cells per row. Quoting follows
// RFC 4180 (double quotes, embedded quotes doubled, quoted cells may
// contain commas and newlines). CR/LF and LF line endings both accepted.
struct Table {
    std::vector<std::vector<std::string>> rows;
};

Table parse(std::string_view text);
Table read_file(const std::string& path);

std::string escape_cell(std::string_view cell);
std::string join_row(const std::vector<std::string>& cells);
void write_file(const std::string& path, const Table& table);

// Shortest decimal representation that round-trips the double exactly.
// Integral values print without a decimal point ("2184", not "2184.0").
std::string format_number(double value);

// Strips surrounding whitespace, a leading dollar sign, and thousands
// separators ("$335,000" -> 335000). Returns false on anything that is
// not a plain number after stripping.
bool parse_number(std::string_view cell, double& out);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace hpml::csv
