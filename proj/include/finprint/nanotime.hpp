#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace finprint {

constexpr std::int64_t kNanosPerSecond = 1'000'000'000LL;
constexpr std::int64_t kNanosPerDay = 86'400LL * kNanosPerSecond;

// Intraday timestamp, nanoseconds since midnight.
struct NanoTime {
    std::int64_t nanos = 0;

    constexpr std::int64_t seconds() const { return nanos / kNanosPerSecond; }

    static constexpr NanoTime of(int hh, int mm, int ss, std::int64_t frac_nanos = 0) {
        return {((hh * 3600LL + mm * 60LL + ss) * kNanosPerSecond) + frac_nanos};
    }

    friend constexpr bool operator==(NanoTime a, NanoTime b) { return a.nanos == b.nanos; }
    friend constexpr bool operator<(NanoTime a, NanoTime b) { return a.nanos < b.nanos; }
    friend constexpr bool operator<=(NanoTime a, NanoTime b) { return a.nanos <= b.nanos; }
    friend constexpr bool operator>=(NanoTime a, NanoTime b) { return a.nanos >= b.nanos; }
};

struct TimeParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline bool two_digits(std::string_view s, std::size_t pos, int& out) {
    if (pos + 1 >= s.size()) return false;
    const char a = s[pos], b = s[pos + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') return false;
    out = (a - '0') * 10 + (b - '0');
    return true;
}
} // namespace detail

// HH:MM:SS followed by '.' and 1-9 fractional digits.  Fewer than nine
// digits are right-padded with zeros (the feed documents microseconds but
// ships nine digits; we take the stamps as ground truth).
inline NanoTime parse_nanotime(std::string_view text) {
    int hh = 0, mm = 0, ss = 0;
    if (text.size() < 10 || text[2] != ':' || text[5] != ':' || text[8] != '.')
        throw TimeParseError("malformed time literal: expected HH:MM:SS.frac, got \"" +
                             std::string(text) + "\"");
    if (!detail::two_digits(text, 0, hh))
        throw TimeParseError("bad hour digits in \"" + std::string(text) + "\"");
    if (!detail::two_digits(text, 3, mm))
        throw TimeParseError("bad minute digits in \"" + std::string(text) + "\"");
    if (!detail::two_digits(text, 6, ss))
        throw TimeParseError("bad second digits in \"" + std::string(text) + "\"");
    if (hh > 23) throw TimeParseError("hour out of range in \"" + std::string(text) + "\"");
    if (mm > 59) throw TimeParseError("minute out of range in \"" + std::string(text) + "\"");
    if (ss > 59) throw TimeParseError("second out of range in \"" + std::string(text) + "\"");

    const std::string_view frac = text.substr(9);
    if (frac.empty() || frac.size() > 9)
        throw TimeParseError("fractional part must have 1-9 digits in \"" +
                             std::string(text) + "\"");
    std::int64_t frac_nanos = 0;
    for (char c : frac) {
        if (c < '0' || c > '9')
            throw TimeParseError("bad fractional digit in \"" + std::string(text) + "\"");
        frac_nanos = frac_nanos * 10 + (c - '0');
    }
    for (std::size_t i = frac.size(); i < 9; ++i) frac_nanos *= 10;

    return NanoTime::of(hh, mm, ss, frac_nanos);
}

// Always renders nine fractional digits, matching the feed samples.
inline std::string format_nanotime(NanoTime t) {
    const std::int64_t total_s = t.nanos / kNanosPerSecond;
    const std::int64_t frac = t.nanos % kNanosPerSecond;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d.%09lld",
                  static_cast<int>(total_s / 3600),
                  static_cast<int>((total_s / 60) % 60),
                  static_cast<int>(total_s % 60),
                  static_cast<long long>(frac));
    return buf;
}

} // namespace finprint
