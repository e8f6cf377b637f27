#include "coda/csv.hpp"

#include <fstream>
#include <sstream>

#include "coda/errors.hpp"

namespace coda {

namespace {

std::vector<std::string> parse_line(const std::string& line, std::size_t row_index) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty()) {
                throw ParseError(row_index, fields.size(), "quote inside unquoted field");
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError(row_index, fields.size(), "unterminated quote");
    fields.push_back(field);
    return fields;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == EOF) break;
        auto fields = parse_line(line, row_index);
        if (row_index == 0) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                throw ParseError(row_index, fields.size(), "field count differs from header");
            }
            table.rows.push_back(std::move(fields));
        }
        ++row_index;
    }
    if (table.header.empty()) throw ParseError(0, 0, "empty csv");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, 0, "cannot open " + path);
    return parse_csv(in);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw ParseError(0, 0, "cannot write " + path);
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) out << ',';
        out << csv_escape(table.header[j]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << csv_escape(row[j]);
        }
        out << '\n';
    }
}

}  // namespace coda
