#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "finprint/decimal.hpp"
#include "finprint/etf.hpp"
#include "finprint/fingerprint.hpp"
#include "finprint/nanotime.hpp"
#include "finprint/rng.hpp"

// Synthetic TAQ-format trading day: type-3 mappings, sparse type-34
// statuses, and type-105 imbalances drawn from a three-cluster intraday
// intensity (open / midday / close, close heaviest).  The generator keeps
// exact tallies of what it emitted so the parser, classifier and aggregator
// can be checked against ground truth instead of proprietary data.

namespace finprint {

struct IntensityProfile {
    double open_weight = 0.3;
    double midday_weight = 0.2;
    double close_weight = 0.5;
    std::int64_t peak_rate_cap = 200'000; // max type-105 lines per time bin
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_symbols = 100;
    double etf_symbol_fraction = 0.13;
    std::int64_t total_messages = 100'000; // in-session type-105 lines
    IntensityProfile intensity;
    double etf_message_share = 0.125;
    double etf_dollar_share = 0.60;
    double price_mu = 3.912023005428146;   // ln 50: log-normal base prices
    double price_sigma = 0.5;
    double qty_mu = 5.298317366548036;     // ln 200: heavy-tailed quantities
    double qty_sigma = 1.2;
    double settle_clear_probability = 1.0;
    double malformed_fraction = 0.0;       // fault injection, off by default
    NanoTime session_start = NanoTime::of(3, 30, 0);
    NanoTime session_end = NanoTime::of(16, 0, 0);
    int time_bin_seconds = 100;

    void validate() const {
        if (n_symbols < 2) throw std::invalid_argument("SynthConfig: need at least 2 symbols");
        if (total_messages < 0)
            throw std::invalid_argument("SynthConfig: total_messages must be >= 0");
        if (!(etf_message_share > 0.0 && etf_message_share < 1.0))
            throw std::invalid_argument("SynthConfig: etf_message_share must be in (0,1)");
        if (!(etf_dollar_share > 0.0 && etf_dollar_share < 1.0))
            throw std::invalid_argument("SynthConfig: etf_dollar_share must be in (0,1)");
        if (!(etf_symbol_fraction > 0.0 && etf_symbol_fraction < 1.0))
            throw std::invalid_argument("SynthConfig: etf_symbol_fraction must be in (0,1)");
        if (!(settle_clear_probability >= 0.0 && settle_clear_probability <= 1.0))
            throw std::invalid_argument("SynthConfig: settle_clear_probability must be in [0,1]");
        if (!(malformed_fraction >= 0.0 && malformed_fraction < 1.0))
            throw std::invalid_argument("SynthConfig: malformed_fraction must be in [0,1)");
        if (!(session_start < session_end))
            throw std::invalid_argument("SynthConfig: session_end must be after session_start");
        const double w = intensity.open_weight + intensity.midday_weight +
                         intensity.close_weight;
        if (!(w > 0.0)) throw std::invalid_argument("SynthConfig: intensity weights sum to 0");
        if (intensity.peak_rate_cap < 1)
            throw std::invalid_argument("SynthConfig: peak_rate_cap must be >= 1");
    }
};

struct SynthTruth {
    std::string day_label;
    std::int64_t type3 = 0;
    std::int64_t type34 = 0;
    std::int64_t type105 = 0;      // all 105 lines, incl. post-close settles
    std::int64_t in_session_105 = 0;
    std::int64_t etf_105 = 0;      // in-session ETF lines
    std::int64_t post_close_105 = 0;
    std::int64_t malformed = 0;
    std::vector<std::int64_t> bin_counts;     // in-session 105s per time bin
    std::vector<std::int64_t> bin_counts_etf;
    double dollar_total = 0.0;     // Eq-style |p*(q - settle)| over in-session lines
    double dollar_etf = 0.0;
    std::map<std::string, std::int64_t> settle; // nonzero settles only
    std::vector<NameListEntry> names;
    std::set<std::string> etf_symbols; // the set the name rule must recover
};

struct SynthDay {
    std::vector<std::string> lines;
    SynthTruth truth;
};

namespace detail {

inline std::string ticker(int index) {
    std::string t(3, 'A');
    t[2] = static_cast<char>('A' + index % 26);
    t[1] = static_cast<char>('A' + (index / 26) % 26);
    t[0] = static_cast<char>('A' + (index / 676) % 26);
    if (index >= 17576) t += static_cast<char>('A' + (index / 17576 - 1) % 26);
    return t;
}

inline std::string format_cents(std::int64_t cents) {
    return format_decimal(Decimal{cents, 2});
}

// names that the word rule must classify correctly, traps included
inline std::string etf_long_name(const std::string& sym, std::uint64_t pick) {
    switch (pick % 3) {
        case 0: return sym + " LARGE CAP EXCHANGE TRADED FUND";
        case 1: return sym + " EXCHANGE-TRADED NOTES TRUST";
        default: return sym + " GLOBAL INDEX FUND";
    }
}

inline std::string stock_long_name(const std::string& sym, std::uint64_t pick) {
    switch (pick % 4) {
        case 0: return sym + " INDUSTRIES INC";
        case 1: return sym + " HOLDINGS CORP";
        case 2: return sym + " REFUNDING CORP";       // "fund" inside a word
        default: return sym + " FUNDAMENTAL RESOURCES"; // likewise
    }
}

inline std::string malformed_line(std::uint64_t pick) {
    switch (pick % 4) {
        case 0: return "";
        case 1: return "999,1,2,3";
        case 2: return "105,notanumber,09:00:00.0,XXX,1,1.0,0,1,0,0930,M,B,0,0,0";
        default: return "105,7";
    }
}

} // namespace detail

inline SynthDay generate_day(const SynthConfig& cfg, const std::string& day_label = {}) {
    cfg.validate();

    SplitMix64 rng(derive_seed(cfg.seed, 0x73796e7468ULL)); // "synth"
    SynthDay day;
    day.truth.day_label = day_label;

    // --- symbol universe ---
    int n_etf = static_cast<int>(std::llround(cfg.n_symbols * cfg.etf_symbol_fraction));
    n_etf = std::clamp(n_etf, 1, cfg.n_symbols - 1);
    std::vector<int> perm(static_cast<std::size_t>(cfg.n_symbols));
    for (int i = 0; i < cfg.n_symbols; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < cfg.n_symbols - 1; ++i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_below(
                           static_cast<std::uint64_t>(cfg.n_symbols - i)))]);

    std::vector<std::string> symbols(static_cast<std::size_t>(cfg.n_symbols));
    std::vector<bool> is_etf(static_cast<std::size_t>(cfg.n_symbols), false);
    for (int j = 0; j < n_etf; ++j) is_etf[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] = true;
    std::vector<int> etf_ids, stock_ids;
    for (int i = 0; i < cfg.n_symbols; ++i) {
        symbols[static_cast<std::size_t>(i)] = detail::ticker(i);
        (is_etf[static_cast<std::size_t>(i)] ? etf_ids : stock_ids).push_back(i);
    }
    for (int i = 0; i < cfg.n_symbols; ++i) {
        const auto& sym = symbols[static_cast<std::size_t>(i)];
        day.truth.names.push_back(
            {sym, is_etf[static_cast<std::size_t>(i)]
                      ? detail::etf_long_name(sym, rng.next_u64())
                      : detail::stock_long_name(sym, rng.next_u64())});
        if (is_etf[static_cast<std::size_t>(i)]) day.truth.etf_symbols.insert(sym);
    }

    // --- per-symbol base prices (cents) ---
    std::vector<std::int64_t> base_cents(static_cast<std::size_t>(cfg.n_symbols));
    for (int i = 0; i < cfg.n_symbols; ++i) {
        const double p = std::exp(cfg.price_mu + cfg.price_sigma * rng.next_gaussian());
        base_cents[static_cast<std::size_t>(i)] =
            std::max<std::int64_t>(1, std::llround(p * 100.0));
    }
    double mean_etf_price = 0.0, mean_stock_price = 0.0;
    for (int i : etf_ids) mean_etf_price += static_cast<double>(base_cents[static_cast<std::size_t>(i)]);
    for (int i : stock_ids) mean_stock_price += static_cast<double>(base_cents[static_cast<std::size_t>(i)]);
    mean_etf_price /= static_cast<double>(etf_ids.size());
    mean_stock_price /= static_cast<double>(stock_ids.size());

    // ETF quantities are scaled so the expected ETF share of total dollars
    // hits etf_dollar_share given etf_message_share of the messages
    const double m = cfg.etf_message_share, s = cfg.etf_dollar_share;
    const double qty_scale = s * (1.0 - m) * mean_stock_price /
                             ((1.0 - s) * m * mean_etf_price);
    if (!(qty_scale > 1e-7 && qty_scale < 1e7))
        throw std::invalid_argument(
            "SynthConfig: etf_dollar_share=" + std::to_string(s) +
            " with etf_message_share=" + std::to_string(m) +
            " needs ETF quantity scale " + std::to_string(qty_scale) +
            ", outside the feasible range (1e-7, 1e7)");

    // --- draw the in-session type-105 events ---
    const double session_s = static_cast<double>(
        (cfg.session_end.nanos - cfg.session_start.nanos) / kNanosPerSecond);
    const int n_bins = static_cast<int>((session_s + cfg.time_bin_seconds - 1) /
                                        cfg.time_bin_seconds);
    const double wsum = cfg.intensity.open_weight + cfg.intensity.midday_weight +
                        cfg.intensity.close_weight;

    struct Event {
        std::int64_t t_nanos;
        int kind; // 0 = imbalance, 1 = status
        int symbol_id;
    };
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(cfg.total_messages));

    std::vector<std::int64_t> bin_load(static_cast<std::size_t>(n_bins), 0);
    auto draw_seconds = [&]() {
        const double u = rng.next_double() * wsum;
        double center, sd;
        if (u < cfg.intensity.open_weight) {
            center = 0.02 * session_s; sd = 0.04 * session_s;
        } else if (u < cfg.intensity.open_weight + cfg.intensity.midday_weight) {
            center = 0.50 * session_s; sd = 0.08 * session_s;
        } else {
            center = 0.97 * session_s; sd = 0.04 * session_s;
        }
        return std::clamp(center + sd * rng.next_gaussian(), 0.0, session_s - 1e-6);
    };

    for (std::int64_t k = 0; k < cfg.total_messages; ++k) {
        double sec = draw_seconds();
        int bin = std::min(n_bins - 1, static_cast<int>(sec / cfg.time_bin_seconds));
        for (int tries = 0; bin_load[static_cast<std::size_t>(bin)] >=
                            cfg.intensity.peak_rate_cap; ++tries) {
            if (tries > 64) { // cap everywhere in the clusters: scan for room
                int free_bin = -1;
                for (int b2 = 0; b2 < n_bins; ++b2)
                    if (bin_load[static_cast<std::size_t>(b2)] <
                        cfg.intensity.peak_rate_cap) { free_bin = b2; break; }
                if (free_bin < 0)
                    throw std::invalid_argument(
                        "SynthConfig: total_messages exceeds peak_rate_cap * bins");
                bin = free_bin;
                sec = (bin + 0.5) * cfg.time_bin_seconds;
                break;
            }
            sec = rng.next_double() * (session_s - 1e-6);
            bin = std::min(n_bins - 1, static_cast<int>(sec / cfg.time_bin_seconds));
        }
        ++bin_load[static_cast<std::size_t>(bin)];

        const bool etf = rng.next_double() < cfg.etf_message_share;
        const auto& ids = etf ? etf_ids : stock_ids;
        const int sym = ids[static_cast<std::size_t>(rng.next_below(ids.size()))];
        events.push_back({cfg.session_start.nanos +
                              static_cast<std::int64_t>(sec * kNanosPerSecond),
                          0, sym});
    }

    // occasional security-status messages
    const int n_status = cfg.total_messages > 0 ? std::max(1, cfg.n_symbols / 20) : 0;
    for (int k = 0; k < n_status; ++k) {
        const double sec = rng.next_double() * (session_s - 1e-6);
        events.push_back({cfg.session_start.nanos +
                              static_cast<std::int64_t>(sec * kNanosPerSecond),
                          1, static_cast<int>(rng.next_below(
                                 static_cast<std::uint64_t>(cfg.n_symbols)))});
    }

    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t_nanos < b.t_nanos; });

    // --- settles: symbols that fail to clear get one post-close line ---
    std::set<int> touched;
    for (const auto& e : events)
        if (e.kind == 0) touched.insert(e.symbol_id);
    std::map<int, std::int64_t> settle_by_id;
    for (int id : touched)
        if (rng.next_double() >= cfg.settle_clear_probability) {
            const double q = std::exp(cfg.qty_mu + cfg.qty_sigma * rng.next_gaussian());
            settle_by_id[id] = std::max<std::int64_t>(1, std::llround(q));
        }

    // --- emit ---
    day.truth.bin_counts.assign(static_cast<std::size_t>(n_bins), 0);
    day.truth.bin_counts_etf.assign(static_cast<std::size_t>(n_bins), 0);
    std::int64_t seq = 0;
    std::vector<std::int64_t> sym_seq(static_cast<std::size_t>(cfg.n_symbols), 0);

    auto maybe_inject = [&]() {
        if (cfg.malformed_fraction > 0.0 && rng.next_double() < cfg.malformed_fraction) {
            day.lines.push_back(detail::malformed_line(rng.next_u64()));
            ++day.truth.malformed;
        }
    };

    for (int i = 0; i < cfg.n_symbols; ++i) {
        const auto& sym = symbols[static_cast<std::size_t>(i)];
        day.lines.push_back("3," + std::to_string(++seq) + ',' + sym + ',' +
                            std::to_string(i + 1) + ",51,N,C,100," +
                            detail::format_cents(base_cents[static_cast<std::size_t>(i)]));
        ++day.truth.type3;
    }

    const char* status_codes = "34P5";
    auto emit_105 = [&](std::int64_t t_nanos, int sym_id, std::int64_t qty,
                        std::int64_t price_cents) {
        const auto& sym = symbols[static_cast<std::size_t>(sym_id)];
        const std::int64_t t_s = t_nanos / kNanosPerSecond;
        const char* auction;
        char atype;
        if (t_s < 4 * 3600) { auction = "0400"; atype = 'O'; }
        else if (t_s < 9 * 3600 + 30 * 60) { auction = "0930"; atype = 'M'; }
        else { auction = "1600"; atype = 'C'; }
        const char side = (rng.next_u64() & 1) ? 'B' : 'S';
        const std::int64_t paired = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(std::max<std::int64_t>(1, qty / 2)) + 1));
        std::string line = "105," + std::to_string(++seq) + ',' +
                           format_nanotime(NanoTime{t_nanos}) + ',' + sym + ',' +
                           std::to_string(++sym_seq[static_cast<std::size_t>(sym_id)]) + ',' +
                           detail::format_cents(price_cents) + ',' +
                           std::to_string(paired) + ',' + std::to_string(qty) + ",0," +
                           auction + ',' + atype + ',' + side +
                           ",0,0,0,0,0,0,0,0,0,0, ,";
        day.lines.push_back(std::move(line));
        ++day.truth.type105;
    };

    for (const auto& e : events) {
        maybe_inject();
        if (e.kind == 1) {
            const auto& sym = symbols[static_cast<std::size_t>(e.symbol_id)];
            std::string line = "34," + std::to_string(++seq) + ',' +
                               format_nanotime(NanoTime{e.t_nanos}) + ',' + sym + ',' +
                               std::to_string(++sym_seq[static_cast<std::size_t>(e.symbol_id)]) +
                               ',';
            line += status_codes[rng.next_u64() % 4];
            day.lines.push_back(std::move(line));
            ++day.truth.type34;
            continue;
        }

        const bool etf = is_etf[static_cast<std::size_t>(e.symbol_id)];
        double q = std::exp(cfg.qty_mu + cfg.qty_sigma * rng.next_gaussian());
        if (etf) q *= qty_scale;
        const std::int64_t qty = std::max<std::int64_t>(1, std::llround(q));
        const double jitter = std::exp(0.1 * rng.next_gaussian());
        const std::int64_t price_cents = std::max<std::int64_t>(
            1, std::llround(static_cast<double>(
                   base_cents[static_cast<std::size_t>(e.symbol_id)]) * jitter));

        emit_105(e.t_nanos, e.symbol_id, qty, price_cents);

        const int bin = std::min(n_bins - 1,
                                 static_cast<int>((e.t_nanos - cfg.session_start.nanos) /
                                                  (static_cast<std::int64_t>(cfg.time_bin_seconds) *
                                                   kNanosPerSecond)));
        ++day.truth.in_session_105;
        ++day.truth.bin_counts[static_cast<std::size_t>(bin)];
        if (etf) {
            ++day.truth.etf_105;
            ++day.truth.bin_counts_etf[static_cast<std::size_t>(bin)];
        }
        std::int64_t settle_q = 0;
        if (auto it = settle_by_id.find(e.symbol_id); it != settle_by_id.end())
            settle_q = it->second;
        const double dollars =
            dollar_imbalance(Decimal{price_cents, 2}, qty, settle_q).to_double();
        day.truth.dollar_total += dollars;
        if (etf) day.truth.dollar_etf += dollars;
    }

    // post-close settle lines, one per non-clearing symbol
    std::int64_t post_close_offset = 0;
    for (const auto& [id, settle_q] : settle_by_id) {
        const std::int64_t t = cfg.session_end.nanos + (++post_close_offset) * 1000;
        emit_105(t, id, settle_q,
                 base_cents[static_cast<std::size_t>(id)]);
        ++day.truth.post_close_105;
        day.truth.settle[symbols[static_cast<std::size_t>(id)]] = settle_q;
    }

    return day;
}

} // namespace finprint
