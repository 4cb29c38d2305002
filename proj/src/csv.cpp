#include "relgbdt/csv.hpp"

#include <stdexcept>

namespace relgbdt::csv {

std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  size_t line = 1, col = 1;
  bool in_quotes = false;
  bool cell_started = false;  // true once the current row has any content

  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
    cell_started = false;
  };

  for (size_t i = 0; i < text.size(); ++i, ++col) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
          ++col;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
        if (c == '\n') {
          ++line;
          col = 0;
        }
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty())
          throw std::runtime_error("csv: stray quote at line " + std::to_string(line) +
                                   ", column " + std::to_string(col));
        in_quotes = true;
        cell_started = true;
        break;
      case ',':
        end_cell();
        cell_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        col = 0;
        break;
      default:
        cell.push_back(c);
        cell_started = true;
    }
  }
  if (in_quotes)
    throw std::runtime_error("csv: unterminated quote at line " + std::to_string(line));
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

void write_row(std::string& out, std::span<const std::string> cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n\r") != std::string::npos) {
      out.push_back('"');
      for (char ch : c) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
      }
      out.push_back('"');
    } else {
      out += c;
    }
  }
  out.push_back('\n');
}

}  // namespace relgbdt::csv
