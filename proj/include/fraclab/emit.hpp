#pragma once
// Tabular emission: CSV / JSON, 12 significant digits, LF line endings.
#include "fraclab/errors.hpp"

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fraclab::emit {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    Table() = default;
    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

    void add_row(std::span<const double> row);
    void add_row(std::initializer_list<double> row) { add_row(std::span<const double>(row.begin(), row.size())); }
};

enum class Format { csv, json };

std::string format_double(double v); // %.12g

// Header row + one line per row, fields comma-separated, trailing LF.
std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

// {"columns": [...], "rows": [[...], ...]} with the same digit budget.
std::string to_json(const Table& table);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

void emit(const Table& table, Format format, const std::string& path);

} // namespace fraclab::emit
