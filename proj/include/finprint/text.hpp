#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace finprint {

// Shortest decimal form that round-trips the exact double. Locale-free,
// so emitted files are byte-stable across environments.
inline std::string format_double(double x) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double out = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return out;
}

} // namespace finprint
