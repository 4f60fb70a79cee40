#include "hpml/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hpml::csv {

Table parse(std::string_view text) {
    Table table;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_has_content = false;

    size_t i = 0;
    const size_t n = text.size();
    auto end_cell = [&] {
        row.push_back(std::move(cell));
        cell.clear();
    };
    auto end_row = [&] {
        end_cell();
        table.rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"' && cell.empty()) {
            in_quotes = true;
            row_has_content = true;
        } else if (c == ',') {
            end_cell();
            row_has_content = true;
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            if (row_has_content || !cell.empty() || !row.empty()) end_row();
        } else {
            cell.push_back(c);
        }
        ++i;
    }
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (row_has_content || !cell.empty() || !row.empty()) end_row();
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string escape_cell(std::string_view cell) {
    bool needs_quotes = cell.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(cell);
    std::string out;
    out.reserve(cell.size() + 2);
    out.push_back('"');
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line.push_back(',');
        line += escape_cell(cells[i]);
    }
    return line;
}

void write_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const auto& row : table.rows) {
        out << join_row(row) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_number(double value) {
    char buf[64];
    std::to_chars_result res;
    if (value == std::floor(value) && std::abs(value) < 9007199254740992.0) {
        res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 0);
    } else {
        res = std::to_chars(buf, buf + sizeof(buf), value);
    }
    return std::string(buf, res.ptr);
}

bool parse_number(std::string_view cell, double& out) {
    std::string cleaned;
    cleaned.reserve(cell.size());
    size_t begin = 0, end = cell.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(cell[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(cell[end - 1]))) --end;
    bool seen_digit = false;
    for (size_t i = begin; i < end; ++i) {
        char c = cell[i];
        if (c == '$' && !seen_digit && cleaned.empty()) continue;
        if (c == ',' && seen_digit) continue;
        if (std::isdigit(static_cast<unsigned char>(c))) seen_digit = true;
        cleaned.push_back(c);
    }
    if (cleaned.empty()) return false;
    double v = 0;
    auto res = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), v);
    if (res.ec != std::errc() || res.ptr != cleaned.data() + cleaned.size()) return false;
    out = v;
    return true;
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace hpml::csv
