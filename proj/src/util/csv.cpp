#include "netfeat/util/csv.hpp"

#include <fstream>
#include <iterator>

namespace netfeat::util {

std::vector<CsvRow> read_csv(std::istream& in, const std::string& origin)
{
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;      // inside a quoted field
    bool was_quoted = false;  // current field began with a quote
    bool row_has_content = false;
    std::size_t line = 1;

    const auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    const auto end_row = [&] {
        end_field();
        if (row_has_content)
            rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || was_quoted)
                throw CsvError(origin + ":" + std::to_string(line) + ": stray quote inside field");
            quoted = true;
            was_quoted = true;
            row_has_content = true;
            break;
        case ',':
            end_field();
            row_has_content = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                break;
            field += c;
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            if (was_quoted)
                throw CsvError(origin + ":" + std::to_string(line) + ": text after closing quote");
            field += c;
            row_has_content = true;
        }
    }
    if (quoted)
        throw CsvError(origin + ": unterminated quoted field");
    if (row_has_content || !field.empty())
        end_row();
    return rows;
}

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CsvError("cannot open CSV file: " + path.string());
    return read_csv(in, path.string());
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

} // namespace netfeat::util
