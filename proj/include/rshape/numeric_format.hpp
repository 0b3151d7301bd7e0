#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rshape {

/// Shortest decimal text that parses back to exactly the same double.
/// Locale independent.
std::string format_double(double value);

/// Strict, locale-independent parse of a whole field. Returns nullopt on
/// any trailing garbage or an empty field.
std::optional<double> parse_double(std::string_view text);

}  // namespace rshape
