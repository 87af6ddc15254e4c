#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spreadcast::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes. Surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_line(std::string_view line);

/// Reads the next non-blank line, stripping a trailing CR and, on the first
/// line, a UTF-8 byte-order mark.
bool read_line(std::istream& in, std::string& line, bool first_line = false);

/// Plain decimal with optional sign, fraction and exponent. Thousands
/// separators, hex, inf and nan are rejected.
std::optional<double> parse_number(std::string_view text);

/// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace spreadcast::csv
