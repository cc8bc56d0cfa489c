#include "fncstance/csv.hpp"

#include <fstream>
#include <sstream>

#include "fncstance/error.hpp"

namespace fncstance::csv {

std::vector<Row> parse(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool after_quote = false;  // just closed a quoted field
    bool field_started = false;
    std::size_t record = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        after_quote = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        ++record;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
        } else if (after_quote) {
            throw SchemaError("malformed CSV record " + std::to_string(record) +
                              ": data after closing quote");
        } else if (c == '"') {
            if (field_started) {
                throw SchemaError("malformed CSV record " + std::to_string(record) +
                                  ": quote inside unquoted field");
            }
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw SchemaError("malformed CSV record " + std::to_string(record) +
                          ": unterminated quoted field");
    }
    if (field_started || after_quote || !row.empty()) end_record();
    return rows;
}

std::vector<Row> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string escape(std::string_view field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const Row& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) line.push_back(',');
        line += escape(row[i]);
    }
    line.push_back('\n');
    return line;
}

}  // namespace fncstance::csv
