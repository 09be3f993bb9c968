#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finprint/decimal.hpp"
#include "finprint/nanotime.hpp"

// Text-dump TAQ ARCA feed records: comma-separated lines, first field is
// the message type.  We understand types 3 (symbol index mapping),
// 34 (security status) and 105 (imbalance); everything else passes through
// as Unrecognized so one bad line never kills a four-million-line day.

namespace finprint {

// Fields beyond the documented layout are kept verbatim so a record can be
// written back without losing data we cannot name.
using TrailingFields = std::vector<std::string>;

struct SymbolMapping {
    std::int64_t sequence_number = 0;
    std::string symbol;
    std::int64_t symbol_index = 0;
    std::int64_t market_id = 0;
    TrailingFields trailing;

    friend bool operator==(const SymbolMapping&, const SymbolMapping&) = default;
};

struct SecurityStatus {
    std::int64_t sequence_number = 0;
    NanoTime source_time;
    std::string symbol;
    std::int64_t symbol_seq_num = 0;
    char security_status = ' ';
    TrailingFields trailing;

    friend bool operator==(const SecurityStatus&, const SecurityStatus&) = default;
};

struct ImbalanceMessage {
    std::int64_t sequence_number = 0;
    NanoTime source_time;
    std::string symbol;
    std::int64_t symbol_seq_num = 0;
    Decimal reference_price;
    std::int64_t paired_qty = 0;
    std::int64_t total_imbalance_qty = 0;
    std::int64_t market_imbalance_qty = 0;
    std::string auction_time;     // hh:mm text, kept as written ("0930")
    char auction_type = ' ';      // O, M, H, C, R
    char imbalance_side = ' ';    // B, S, ' ', '0'
    Decimal continuous_book_clearing_price;
    Decimal closing_only_clearing_price;
    Decimal ssr_filing_price;
    TrailingFields trailing;

    friend bool operator==(const ImbalanceMessage&, const ImbalanceMessage&) = default;
};

struct Unrecognized {
    std::string raw;
    std::string reason;

    friend bool operator==(const Unrecognized&, const Unrecognized&) = default;
};

using ParsedMessage = std::variant<SymbolMapping, SecurityStatus, ImbalanceMessage, Unrecognized>;

inline const std::string* message_symbol(const ParsedMessage& m) {
    if (auto* s = std::get_if<SymbolMapping>(&m)) return &s->symbol;
    if (auto* s = std::get_if<SecurityStatus>(&m)) return &s->symbol;
    if (auto* s = std::get_if<ImbalanceMessage>(&m)) return &s->symbol;
    return nullptr;
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        pos = 1;
        if (pos == s.size()) return std::nullopt;
    }
    std::int64_t value = 0;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (c < '0' || c > '9') return std::nullopt;
        if (value > (INT64_MAX - 9) / 10) return std::nullopt;
        value = value * 10 + (c - '0');
    }
    return neg ? -value : value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

// Enumerated one-character fields arrive with stray spaces (" ," tails in
// the samples); an all-space field means "no value" and maps to ' '.
inline std::optional<char> parse_enum_char(std::string_view s) {
    s = trim(s);
    if (s.empty()) return ' ';
    if (s.size() == 1) return s[0];
    return std::nullopt;
}

inline Unrecognized bad_field(std::string_view line, int field_pos, const char* name) {
    return Unrecognized{std::string(line),
                        "bad field " + std::to_string(field_pos) + " (" + name + ")"};
}

} // namespace detail

inline ParsedMessage parse_line(std::string_view line) {
    using namespace detail;
    if (line.empty()) return Unrecognized{"", "empty line"};
    const auto f = split_csv(line);

    if (f[0] == "3") {
        if (f.size() < 5) return Unrecognized{std::string(line), "bad field count"};
        SymbolMapping m;
        if (auto v = parse_int(f[1])) m.sequence_number = *v;
        else return bad_field(line, 2, "sequence_number");
        m.symbol = std::string(f[2]);
        if (m.symbol.empty()) return bad_field(line, 3, "symbol");
        if (auto v = parse_int(f[3])) m.symbol_index = *v;
        else return bad_field(line, 4, "symbol_index");
        if (auto v = parse_int(f[4])) m.market_id = *v;
        else return bad_field(line, 5, "market_id");
        for (std::size_t i = 5; i < f.size(); ++i) m.trailing.emplace_back(f[i]);
        return m;
    }

    if (f[0] == "34") {
        if (f.size() < 6) return Unrecognized{std::string(line), "bad field count"};
        SecurityStatus m;
        if (auto v = parse_int(f[1])) m.sequence_number = *v;
        else return bad_field(line, 2, "sequence_number");
        try {
            m.source_time = parse_nanotime(f[2]);
        } catch (const TimeParseError&) {
            return bad_field(line, 3, "source_time");
        }
        m.symbol = std::string(f[3]);
        if (m.symbol.empty()) return bad_field(line, 4, "symbol");
        if (auto v = parse_int(f[4])) m.symbol_seq_num = *v;
        else return bad_field(line, 5, "symbol_seq_num");
        if (auto c = parse_enum_char(f[5])) m.security_status = *c;
        else return bad_field(line, 6, "security_status");
        for (std::size_t i = 6; i < f.size(); ++i) m.trailing.emplace_back(f[i]);
        return m;
    }

    if (f[0] == "105") {
        if (f.size() < 15) return Unrecognized{std::string(line), "bad field count"};
        ImbalanceMessage m;
        if (auto v = parse_int(f[1])) m.sequence_number = *v;
        else return bad_field(line, 2, "sequence_number");
        try {
            m.source_time = parse_nanotime(f[2]);
        } catch (const TimeParseError&) {
            return bad_field(line, 3, "source_time");
        }
        m.symbol = std::string(f[3]);
        if (m.symbol.empty()) return bad_field(line, 4, "symbol");
        if (auto v = parse_int(f[4])) m.symbol_seq_num = *v;
        else return bad_field(line, 5, "symbol_seq_num");
        if (auto v = parse_decimal(f[5]); v && !v->negative()) m.reference_price = *v;
        else return bad_field(line, 6, "reference_price");
        if (auto v = parse_int(f[6]); v && *v >= 0) m.paired_qty = *v;
        else return bad_field(line, 7, "paired_qty");
        if (auto v = parse_int(f[7]); v && *v >= 0) m.total_imbalance_qty = *v;
        else return bad_field(line, 8, "total_imbalance_qty");
        if (auto v = parse_int(f[8]); v && *v >= 0) m.market_imbalance_qty = *v;
        else return bad_field(line, 9, "market_imbalance_qty");
        m.auction_time = std::string(f[9]);
        if (auto c = parse_enum_char(f[10]);
            c && (*c == 'O' || *c == 'M' || *c == 'H' || *c == 'C' || *c == 'R'))
            m.auction_type = *c;
        else return bad_field(line, 11, "auction_type");
        if (auto c = parse_enum_char(f[11]);
            c && (*c == 'B' || *c == 'S' || *c == ' ' || *c == '0'))
            m.imbalance_side = *c;
        else return bad_field(line, 12, "imbalance_side");
        if (auto v = parse_decimal(f[12])) m.continuous_book_clearing_price = *v;
        else return bad_field(line, 13, "continuous_book_clearing_price");
        if (auto v = parse_decimal(f[13])) m.closing_only_clearing_price = *v;
        else return bad_field(line, 14, "closing_only_clearing_price");
        if (auto v = parse_decimal(f[14])) m.ssr_filing_price = *v;
        else return bad_field(line, 15, "ssr_filing_price");
        for (std::size_t i = 15; i < f.size(); ++i) m.trailing.emplace_back(f[i]);
        return m;
    }

    return Unrecognized{std::string(line), "bad type"};
}

// ---------------------------------------------------------------------------
// formatting (inverse of parse_line for the typed records)
// ---------------------------------------------------------------------------

namespace detail {

inline void append_trailing(std::string& out, const TrailingFields& trailing) {
    for (const auto& t : trailing) {
        out += ',';
        out += t;
    }
}

} // namespace detail

inline std::string format_line(const SymbolMapping& m) {
    std::string out = "3," + std::to_string(m.sequence_number) + ',' + m.symbol + ',' +
                      std::to_string(m.symbol_index) + ',' + std::to_string(m.market_id);
    detail::append_trailing(out, m.trailing);
    return out;
}

inline std::string format_line(const SecurityStatus& m) {
    std::string out = "34," + std::to_string(m.sequence_number) + ',' +
                      format_nanotime(m.source_time) + ',' + m.symbol + ',' +
                      std::to_string(m.symbol_seq_num) + ',';
    out += m.security_status;
    detail::append_trailing(out, m.trailing);
    return out;
}

inline std::string format_line(const ImbalanceMessage& m) {
    std::string out = "105," + std::to_string(m.sequence_number) + ',' +
                      format_nanotime(m.source_time) + ',' + m.symbol + ',' +
                      std::to_string(m.symbol_seq_num) + ',' +
                      format_decimal(m.reference_price) + ',' +
                      std::to_string(m.paired_qty) + ',' +
                      std::to_string(m.total_imbalance_qty) + ',' +
                      std::to_string(m.market_imbalance_qty) + ',' + m.auction_time + ',';
    out += m.auction_type;
    out += ',';
    out += m.imbalance_side;
    out += ',' + format_decimal(m.continuous_book_clearing_price) + ',' +
           format_decimal(m.closing_only_clearing_price) + ',' +
           format_decimal(m.ssr_filing_price);
    detail::append_trailing(out, m.trailing);
    return out;
}

inline std::string format_line(const Unrecognized& m) { return m.raw; }

inline std::string format_message(const ParsedMessage& m) {
    return std::visit([](const auto& rec) { return format_line(rec); }, m);
}

// ---------------------------------------------------------------------------
// streaming
// ---------------------------------------------------------------------------

struct ParseStats {
    std::int64_t total_lines = 0;
    std::int64_t type3 = 0;
    std::int64_t type34 = 0;
    std::int64_t type105 = 0;
    std::int64_t unrecognized = 0;
    std::map<std::string, std::int64_t> error_reasons;

    void count(const ParsedMessage& m) {
        ++total_lines;
        if (std::holds_alternative<SymbolMapping>(m)) ++type3;
        else if (std::holds_alternative<SecurityStatus>(m)) ++type34;
        else if (std::holds_alternative<ImbalanceMessage>(m)) ++type105;
        else {
            ++unrecognized;
            ++error_reasons[std::get<Unrecognized>(m).reason];
        }
    }

    void merge(const ParseStats& o) {
        total_lines += o.total_lines;
        type3 += o.type3;
        type34 += o.type34;
        type105 += o.type105;
        unrecognized += o.unrecognized;
        for (const auto& [k, v] : o.error_reasons) error_reasons[k] += v;
    }

    // flat key=value report
    std::string report() const {
        std::ostringstream os;
        os << "total_lines=" << total_lines << '\n'
           << "type3=" << type3 << '\n'
           << "type34=" << type34 << '\n'
           << "type105=" << type105 << '\n'
           << "unrecognized=" << unrecognized << '\n';
        for (const auto& [reason, n] : error_reasons) {
            std::string key = reason;
            for (char& c : key)
                if (c == ' ' || c == '(' || c == ')') c = '_';
            os << "reason." << key << "=" << n << '\n';
        }
        return os.str();
    }
};

struct StreamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One-pass reader over a newline-delimited feed dump.  Yields messages in
// input order with constant memory per line; stats accumulate as it goes.
class MessageStream {
public:
    explicit MessageStream(std::istream& in) : in_(in) {}

    std::optional<ParsedMessage> next() {
        std::string line;
        if (!std::getline(in_, line)) {
            if (in_.bad())
                throw StreamError("I/O failure after line " + std::to_string(line_no_));
            return std::nullopt;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        ParsedMessage m = parse_line(line);
        stats_.count(m);
        return m;
    }

    const ParseStats& stats() const { return stats_; }
    std::int64_t lines_read() const { return line_no_; }

private:
    std::istream& in_;
    ParseStats stats_;
    std::int64_t line_no_ = 0;
};

// Convenience eager form; the streaming class is preferred for full days.
inline std::pair<std::vector<ParsedMessage>, ParseStats> read_all(std::istream& in) {
    MessageStream stream(in);
    std::vector<ParsedMessage> out;
    while (auto m = stream.next()) out.push_back(std::move(*m));
    return {std::move(out), stream.stats()};
}

} // namespace finprint
