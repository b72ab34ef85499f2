#include "bezsimplex/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "bezsimplex/errors.hpp"

namespace bezsimplex {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw Error("cannot format floating-point value");
    }
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view field) {
    if (field == "nan") {
        return std::nan("");
    }
    if (field == "inf") {
        return HUGE_VAL;
    }
    if (field == "-inf") {
        return -HUGE_VAL;
    }
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error("cannot parse '" + std::string(field) + "' as a number");
    }
    return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace bezsimplex
