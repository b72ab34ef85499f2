#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bezsimplex {

/// Shortest decimal string that parses back to the same double, independent of locale.
[[nodiscard]] std::string format_double(double value);

/// Locale-independent parse of a full field; throws bezsimplex::Error on junk.
[[nodiscard]] double parse_double(std::string_view field);

/// Split one CSV line on commas (no quoting; the library never emits quoted fields).
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace bezsimplex
