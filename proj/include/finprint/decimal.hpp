#pragma once

#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace finprint {

// Exact decimal value as written in the feed: units * 10^-scale.
// Prices multiplied by integer share quantities stay exact, which plain
// doubles cannot guarantee (0.01-grid prices are not binary fractions).
struct Decimal {
    std::int64_t units = 0; // signed mantissa
    std::int32_t scale = 0; // digits after the point, as written

    double to_double() const {
        return static_cast<double>(units) * std::pow(10.0, -scale);
    }

    bool negative() const { return units < 0; }

    Decimal abs() const { return {units < 0 ? -units : units, scale}; }

    // exact product with an integer, same scale
    Decimal times(std::int64_t k) const { return {units * k, scale}; }

    friend bool operator==(const Decimal&, const Decimal&) = default;
};

// Accepts [+-]digits[.digits] and [+-].digits; no exponent forms.
inline std::optional<Decimal> parse_decimal(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool neg = false;
    if (text[0] == '+' || text[0] == '-') {
        neg = text[0] == '-';
        pos = 1;
    }
    std::int64_t units = 0;
    std::int32_t scale = 0;
    bool any_digit = false, seen_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == '.') {
            if (seen_point) return std::nullopt;
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        if (units > (INT64_MAX - 9) / 10) return std::nullopt; // overflow
        units = units * 10 + (c - '0');
        if (seen_point) ++scale;
        any_digit = true;
    }
    if (!any_digit) return std::nullopt;
    return Decimal{neg ? -units : units, scale};
}

inline std::string format_decimal(const Decimal& d) {
    std::uint64_t mag = d.units < 0 ? static_cast<std::uint64_t>(-(d.units + 1)) + 1
                                    : static_cast<std::uint64_t>(d.units);
    std::string digits = std::to_string(mag);
    if (d.scale > 0) {
        if (static_cast<std::int32_t>(digits.size()) <= d.scale)
            digits.insert(0, static_cast<std::size_t>(d.scale) + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(d.scale), 1, '.');
    }
    return d.units < 0 ? "-" + digits : digits;
}

} // namespace finprint
