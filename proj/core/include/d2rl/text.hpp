#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace d2rl::text {

/// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);

/// Strict parses: the whole of `text` must be consumed. Throw std::invalid_argument.
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::uint64_t parse_uint(std::string_view text);
bool parse_bool(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// Splits on `sep`, trimming each field. An empty input gives one empty field.
std::vector<std::string_view> split(std::string_view text, char sep);

/// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_whitespace(std::string_view text);

}  // namespace d2rl::text
