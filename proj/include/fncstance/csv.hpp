#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fncstance::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader. Quoted fields may contain commas, doubled quotes and line
// breaks. A leading UTF-8 BOM is skipped. Unterminated quotes or stray
// characters after a closing quote raise SchemaError with the record number.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::string& path);

// Quotes the field when it contains a comma, quote, CR/LF or edge spaces.
std::string escape(std::string_view field);

std::string format_row(const Row& row);

}  // namespace fncstance::csv
