#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lrfr::csv {

/// Splits one CSV line into fields. Double-quoted fields may contain commas
/// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Splits text into lines, dropping the trailing '\r' of CRLF endings.
std::vector<std::string_view> lines(std::string_view text);

// Shortest decimal text that parses back to the same value.
std::string format_double(double value);
std::string format_float(float value);
/// printf "%.*g" with the given number of significant digits.
std::string format_significant(double value, int digits);

/// Strict parse of the whole field; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

}  // namespace lrfr::csv
