#pragma once

#include <cctype>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finprint/feed.hpp"

// ETF universe selection by security long name: a name qualifies if it
// contains "exchange traded" (hyphen tolerated) or the standalone word
// "fund".  Word-boundary matching keeps "REFUNDING" out.

namespace finprint {

struct NameListEntry {
    std::string symbol;
    std::string long_name;
};

struct SymbolUniverse {
    std::set<std::string> etf_symbols; // uppercased
    std::int64_t total_entries = 0;
    std::int64_t duplicate_symbols = 0;

    bool contains(std::string_view symbol) const {
        std::string up(symbol);
        for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return etf_symbols.count(up) > 0;
    }
};

namespace detail {

inline std::string normalize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == '-') c = ' ';
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

inline bool contains_word(const std::string& haystack, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

} // namespace detail

inline bool is_etf_name(std::string_view long_name) {
    const std::string n = detail::normalize_name(long_name);
    if (n.find("exchange traded") != std::string::npos) return true;
    return detail::contains_word(n, "fund");
}

inline SymbolUniverse build_universe(const std::vector<NameListEntry>& entries) {
    SymbolUniverse u;
    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (e.symbol.empty()) continue;
        std::string up = e.symbol;
        for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (!seen.insert(up).second) {
            ++u.duplicate_symbols; // duplicates keep first
            continue;
        }
        ++u.total_entries;
        if (is_etf_name(e.long_name)) u.etf_symbols.insert(std::move(up));
    }
    return u;
}

// One entry per line, SYMBOL<delim>LONG NAME.  Blank lines skipped.
inline std::vector<NameListEntry> read_name_list(std::istream& in, char delim = '|') {
    std::vector<NameListEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cut = line.find(delim);
        if (cut == std::string::npos) {
            entries.push_back({line, ""});
        } else {
            entries.push_back({line.substr(0, cut), line.substr(cut + 1)});
        }
    }
    return entries;
}

// market keeps every message; etf keeps the subsequence whose symbol is in
// the universe, so etf is contained in market by construction.
inline std::pair<std::vector<ParsedMessage>, std::vector<ParsedMessage>>
partition(const std::vector<ParsedMessage>& messages, const SymbolUniverse& universe) {
    std::vector<ParsedMessage> market = messages;
    std::vector<ParsedMessage> etf;
    for (const auto& m : messages) {
        if (const std::string* sym = message_symbol(m); sym && universe.contains(*sym))
            etf.push_back(m);
    }
    return {std::move(market), std::move(etf)};
}

} // namespace finprint
