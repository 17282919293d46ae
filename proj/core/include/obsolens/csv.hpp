#pragma once

// Minimal RFC 4180 reader/writer: comma separator, double-quote quoting,
// embedded quotes doubled, CRLF or LF line ends accepted on input.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace obsolens::csv {

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Next record, or nullopt at end of input. Throws Error(kFormat) on an
// unterminated quoted field.
std::optional<std::vector<std::string>> read_row(std::istream& in);

// Shortest round-trip representation for doubles ("1.44", "-0.6", "5.511e-07").
std::string format_double(double value);

}  // namespace obsolens::csv
