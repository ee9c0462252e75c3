#include "nnse/csv.hpp"

#include "nnse/errors.hpp"
#include "nnse/io.hpp"

namespace nnse::csv {

std::vector<Record> parse(std::string_view text, const std::string& source) {
  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t quote_line = 0;
  current.line = 1;

  auto end_record = [&] {
    if (record_has_content) {
      current.fields.push_back(std::move(field));
      records.push_back(std::move(current));
    }
    current = Record{};
    field.clear();
    record_has_content = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        quote_line = line;
        record_has_content = true;
        break;
      case ',':
        current.fields.push_back(std::move(field));
        field.clear();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
    ++i;
  }
  if (in_quotes) throw ParseError(source, quote_line, "unterminated quoted field");
  end_record();
  return records;
}

std::vector<Record> read_file(const std::string& path) { return parse(io::read_file(path), path); }

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace nnse::csv
