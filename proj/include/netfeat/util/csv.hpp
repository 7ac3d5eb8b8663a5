#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace netfeat::util {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, quotes ("") and newlines.
/// Accepts LF or CRLF line ends. Blank lines are skipped.
std::vector<CsvRow> read_csv(std::istream& in, const std::string& origin = "<csv>");
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Writes one row terminated by '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace netfeat::util
