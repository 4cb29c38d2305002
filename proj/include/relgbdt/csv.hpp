#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relgbdt::csv {

// Parses RFC-4180-style CSV: comma delimiter, optional double-quote quoting,
// "" escapes inside quoted cells, \n or \r\n row ends. Returns one vector of
// cells per row; empty trailing line is ignored. Throws std::runtime_error
// with line/column on malformed quoting.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Appends one encoded row (plus newline) to out. Cells are quoted only when
// they contain a comma, quote, or newline.
void write_row(std::string& out, std::span<const std::string> cells);

}  // namespace relgbdt::csv
