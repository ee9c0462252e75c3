#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nnse::csv {

// One parsed record plus the physical line it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks. Blank lines are skipped. Throws ParseError on an unterminated quote.
std::vector<Record> parse(std::string_view text, const std::string& source);

std::vector<Record> read_file(const std::string& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace nnse::csv
