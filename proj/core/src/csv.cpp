#include "obsolens/csv.hpp"

#include <array>
#include <charconv>

#include "obsolens/error.hpp"

namespace obsolens::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << "\r\n";
}

std::optional<std::vector<std::string>> read_row(std::istream& in) {
  if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
  std::vector<std::string> fields(1);
  bool quoted = false;
  bool field_was_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          fields.back() += '"';
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
      continue;
    }
    if (c == '"' && fields.back().empty() && !field_was_quoted) {
      quoted = field_was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
      field_was_quoted = false;
    } else if (c == '\n') {
      return fields;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      return fields;
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kFormat, "unterminated quoted CSV field");
  return fields;
}

std::string format_double(double value) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace obsolens::csv
