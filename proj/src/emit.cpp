#include "fraclab/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fraclab::emit {

void Table::add_row(std::span<const double> row) {
    if (row.size() != columns.size()) throw LengthMismatch("Table::add_row: row width != column count");
    rows.emplace_back(row.begin(), row.end());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    if (table.columns.empty()) throw UsageError("to_csv: table has no columns");
    std::string out;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        const std::string& name = table.columns[j];
        if (name.find_first_of(",\n\"") != std::string::npos)
            throw UsageError("to_csv: column name needs quoting, use plain names");
        out += name;
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_double(row[j]);
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("parse_csv: empty input");
    Table table;
    {
        std::istringstream hdr(line);
        std::string field;
        while (std::getline(hdr, field, ',')) table.columns.push_back(field);
    }
    std::vector<double> row;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        row.clear();
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (pos != field.size()) throw UsageError("parse_csv: bad numeric field '" + field + "'");
            row.push_back(v);
        }
        table.add_row(row);
    }
    return table;
}

std::string to_json(const Table& table) {
    std::string out = "{\n  \"columns\": [";
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ", ";
        out += '"';
        out += table.columns[j];
        out += '"';
    }
    out += "],\n  \"rows\": [";
    for (size_t i = 0; i < table.rows.size(); ++i) {
        out += i ? ",\n    [" : "\n    [";
        const auto& row = table.rows[i];
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out += ", ";
            out += format_double(row[j]);
        }
        out += ']';
    }
    out += table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("write_file: cannot open '" + path + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw UsageError("write_file: short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("read_file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void emit(const Table& table, Format format, const std::string& path) {
    write_file(path, format == Format::csv ? to_csv(table) : to_json(table));
}

} // namespace fraclab::emit
