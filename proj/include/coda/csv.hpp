#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coda {

/// Minimal RFC-4180-ish CSV support: comma separated, double quotes for
/// fields containing commas/quotes/newlines, UTF-8 passthrough.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in);

std::string csv_escape(const std::string& field);
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace coda
