#pragma once

// Small parsing helpers shared by the text codecs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "imprint/error.hpp"

namespace imprint::text {

std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on '\n'; a trailing newline does not produce an empty last line.
/// '\r' before '\n' is stripped.
std::vector<std::string_view> lines(std::string_view s);

std::uint64_t parse_u64(std::string_view token, std::string_view what, Errc on_error);
double parse_double(std::string_view token, std::string_view what, Errc on_error);

/// Shortest representation that round-trips.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

std::string trim(std::string_view s);

}  // namespace imprint::text
