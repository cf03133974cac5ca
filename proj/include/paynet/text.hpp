#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paynet::text {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv(std::string_view line);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

std::string_view trim(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

}  // namespace paynet::text
