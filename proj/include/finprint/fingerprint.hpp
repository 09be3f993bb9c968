#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finprint/decimal.hpp"
#include "finprint/feed.hpp"
#include "finprint/mat.hpp"
#include "finprint/nanotime.hpp"
#include "finprint/text.hpp"

// One trading day of type-105 messages becomes a time-bin x price-bin
// dollar-imbalance matrix, then a canonical 96x96 nonnegative image.

namespace finprint {

constexpr int kFingerprintSize = 96;

enum class Family { market, etf };
enum class FingerprintMode { time_price, state_hist };
enum class PriceScale { log, linear };

inline const char* to_string(Family f) { return f == Family::market ? "market" : "etf"; }
inline const char* to_string(FingerprintMode m) {
    return m == FingerprintMode::time_price ? "time_price" : "state_hist";
}

inline std::optional<Family> family_from_string(std::string_view s) {
    if (s == "market") return Family::market;
    if (s == "etf") return Family::etf;
    return std::nullopt;
}

inline std::optional<FingerprintMode> mode_from_string(std::string_view s) {
    if (s == "time_price") return FingerprintMode::time_price;
    if (s == "state_hist") return FingerprintMode::state_hist;
    return std::nullopt;
}

// Session and binning parameters.  Default session 03:30-16:00 (45,000 s)
// in 100-second bins; price bins log-spaced over the day's observed range.
struct BinGrid {
    NanoTime session_start = NanoTime::of(3, 30, 0);
    NanoTime session_end = NanoTime::of(16, 0, 0);
    int time_bin_seconds = 100;
    int n_time_bins = 450;
    int n_price_bins = 450;
    PriceScale price_scale = PriceScale::log;
    // resolved per day from positive reference prices when unset
    std::optional<double> price_min;
    std::optional<double> price_max;

    void validate() const {
        if (!(session_start < session_end))
            throw std::invalid_argument("BinGrid: session_end must be after session_start");
        if (time_bin_seconds <= 0 || n_time_bins <= 0 || n_price_bins <= 0)
            throw std::invalid_argument("BinGrid: bin counts and width must be positive");
        const std::int64_t session_s =
            (session_end.nanos - session_start.nanos) / kNanosPerSecond;
        if (static_cast<std::int64_t>(n_time_bins) * time_bin_seconds < session_s)
            throw std::invalid_argument("BinGrid: time bins do not cover the session");
    }

    static BinGrid for_session(NanoTime start, NanoTime end, int bin_seconds = 100) {
        BinGrid g;
        g.session_start = start;
        g.session_end = end;
        g.time_bin_seconds = bin_seconds;
        const std::int64_t session_s = (end.nanos - start.nanos) / kNanosPerSecond;
        g.n_time_bins = static_cast<int>((session_s + bin_seconds - 1) / bin_seconds);
        g.n_price_bins = g.n_time_bins;
        return g;
    }
};

struct DailyAggregate {
    BinGrid grid;
    Mat dollar;                          // n_time_bins x n_price_bins, |$Imb| per cell
    std::vector<std::int64_t> msg_count; // per time bin
    std::map<std::string, std::int64_t> settle_qty;
    std::int64_t discarded = 0;          // out-of-session type-105 messages
    std::string day_label;
    Family family = Family::market;
};

struct Fingerprint {
    Mat cells; // 96x96, finite, nonnegative
    std::string day_label;
    Family family = Family::market;
    FingerprintMode mode = FingerprintMode::time_price;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

// ---------------------------------------------------------------------------
// scalar transforms
// ---------------------------------------------------------------------------

// |p * (Imb - Settle)| carried out exactly on the decimal price grid.
inline Decimal dollar_imbalance(const Decimal& reference_price, std::int64_t imbalance_qty,
                                std::int64_t settle_qty) {
    return reference_price.times(imbalance_qty - settle_qty).abs();
}

// ln(1+x); unity absorbs the zero cells that dominate imbalance data.
inline double log1p_transform(double x) {
    if (x < 0.0)
        throw std::domain_error("log1p_transform: negative input " + format_double(x));
    return std::log1p(x);
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

// Settle quantity per symbol: last total_imbalance_qty stamped at or after
// the session end, 0 when a symbol clears (the usual case).
inline std::map<std::string, std::int64_t>
resolve_settle(const std::vector<ImbalanceMessage>& messages, NanoTime session_end) {
    std::map<std::string, std::int64_t> settle;
    for (const auto& m : messages)
        if (m.source_time >= session_end) settle[m.symbol] = m.total_imbalance_qty;
    return settle;
}

inline DailyAggregate aggregate_day(const std::vector<ImbalanceMessage>& messages,
                                    BinGrid grid, Family family,
                                    std::string day_label = {}) {
    grid.validate();

    // pass 1: settle quantities and the day's positive price range
    auto settle = resolve_settle(messages, grid.session_end);
    if (!grid.price_min || !grid.price_max) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& m : messages) {
            if (!(grid.session_start <= m.source_time && m.source_time < grid.session_end))
                continue;
            const double p = m.reference_price.to_double();
            if (p <= 0.0) continue;
            if (!any) { lo = hi = p; any = true; }
            else { lo = std::min(lo, p); hi = std::max(hi, p); }
        }
        if (!grid.price_min) grid.price_min = any ? lo : 0.0;
        if (!grid.price_max) grid.price_max = any ? hi : 0.0;
    }

    DailyAggregate agg;
    agg.grid = grid;
    agg.dollar = Mat(grid.n_time_bins, grid.n_price_bins);
    agg.msg_count.assign(static_cast<std::size_t>(grid.n_time_bins), 0);
    agg.settle_qty = std::move(settle);
    agg.day_label = std::move(day_label);
    agg.family = family;

    const double pmin = *grid.price_min, pmax = *grid.price_max;
    const double log_pmin = pmin > 0.0 ? std::log(pmin) : 0.0;
    const double log_span = (pmin > 0.0 && pmax > pmin) ? std::log(pmax) - log_pmin : 0.0;
    const double lin_span = pmax - pmin;
    const std::int64_t bin_nanos =
        static_cast<std::int64_t>(grid.time_bin_seconds) * kNanosPerSecond;

    // pass 2: binning
    for (const auto& m : messages) {
        if (!(grid.session_start <= m.source_time && m.source_time < grid.session_end)) {
            ++agg.discarded;
            continue;
        }
        const int tbin = static_cast<int>((m.source_time.nanos - grid.session_start.nanos) /
                                          bin_nanos);
        const double p = m.reference_price.to_double();
        int pbin = 0;
        if (p > 0.0 && pmax > pmin) {
            const double frac = grid.price_scale == PriceScale::log
                                    ? (log_span > 0.0 ? (std::log(p) - log_pmin) / log_span : 0.0)
                                    : (p - pmin) / lin_span;
            pbin = std::clamp(static_cast<int>(frac * grid.n_price_bins), 0,
                              grid.n_price_bins - 1);
        }
        std::int64_t settle_q = 0;
        if (auto it = agg.settle_qty.find(m.symbol); it != agg.settle_qty.end())
            settle_q = it->second;
        ++agg.msg_count[static_cast<std::size_t>(tbin)];
        agg.dollar.at(tbin, pbin) +=
            dollar_imbalance(m.reference_price, m.total_imbalance_qty, settle_q).to_double();
    }
    return agg;
}

// ---------------------------------------------------------------------------
// 96x96 compression
// ---------------------------------------------------------------------------

namespace detail {

// Row-stochastic overlap matrix mapping n source intervals onto n_out
// destination bins.  edges has n+1 increasing values; destination bins split
// [edges.front(), edges.back()] evenly.  Each source row sums to 1, so
// rebinning through it conserves mass.
inline Mat overlap_matrix(const std::vector<double>& edges, int n_out) {
    const int n_in = static_cast<int>(edges.size()) - 1;
    Mat f(n_in, n_out);
    const double lo = edges.front();
    const double span = edges.back() - lo;
    if (span <= 0.0) {
        for (int i = 0; i < n_in; ++i) f.at(i, 0) = 1.0;
        return f;
    }
    const double out_w = span / n_out;
    for (int i = 0; i < n_in; ++i) {
        const double a = edges[static_cast<std::size_t>(i)];
        const double b = edges[static_cast<std::size_t>(i) + 1];
        const double width = b - a;
        if (width <= 0.0) {
            const int j = std::clamp(static_cast<int>((a - lo) / out_w), 0, n_out - 1);
            f.at(i, j) = 1.0;
            continue;
        }
        int j0 = std::clamp(static_cast<int>((a - lo) / out_w), 0, n_out - 1);
        int j1 = std::clamp(static_cast<int>((b - lo) / out_w), 0, n_out - 1);
        double assigned = 0.0;
        for (int j = j0; j < j1; ++j) {
            const double cut = lo + (j + 1) * out_w;
            const double part = (std::min(cut, b) - std::max(lo + j * out_w, a)) / width;
            f.at(i, j) = std::max(0.0, part);
            assigned += f.at(i, j);
        }
        f.at(i, j1) = std::max(0.0, 1.0 - assigned); // remainder, keeps row sum exact
    }
    return f;
}

} // namespace detail

inline Fingerprint build_fingerprint(const DailyAggregate& agg,
                                     FingerprintMode mode = FingerprintMode::time_price) {
    const int n_time = agg.grid.n_time_bins;
    const int n_price = agg.grid.n_price_bins;
    Fingerprint fp;
    fp.day_label = agg.day_label;
    fp.family = agg.family;
    fp.mode = mode;
    fp.cells = Mat(kFingerprintSize, kFingerprintSize);

    if (mode == FingerprintMode::time_price) {
        // log-transformed dollar matrix, time axis warped by ln(1+t)
        Mat logged(n_time, n_price);
        for (std::size_t i = 0; i < logged.size(); ++i)
            logged.v[i] = log1p_transform(agg.dollar.v[i]);

        std::vector<double> t_edges(static_cast<std::size_t>(n_time) + 1);
        for (int i = 0; i <= n_time; ++i)
            t_edges[static_cast<std::size_t>(i)] = std::log1p(static_cast<double>(i));
        std::vector<double> p_edges(static_cast<std::size_t>(n_price) + 1);
        for (int j = 0; j <= n_price; ++j)
            p_edges[static_cast<std::size_t>(j)] = static_cast<double>(j);

        const Mat ft = detail::overlap_matrix(t_edges, kFingerprintSize);
        const Mat fpm = detail::overlap_matrix(p_edges, kFingerprintSize);

        // cells = ft' * logged * fpm
        Mat tmp(kFingerprintSize, n_price);
        for (int i = 0; i < n_time; ++i) {
            for (int a = 0; a < kFingerprintSize; ++a) {
                const double w = ft.at(i, a);
                if (w == 0.0) continue;
                const double* src = &logged.v[static_cast<std::size_t>(i) * n_price];
                double* dst = &tmp.v[static_cast<std::size_t>(a) * n_price];
                for (int j = 0; j < n_price; ++j) dst[j] += w * src[j];
            }
        }
        for (int a = 0; a < kFingerprintSize; ++a) {
            for (int j = 0; j < n_price; ++j) {
                const double x = tmp.at(a, j);
                if (x == 0.0) continue;
                for (int b = 0; b < kFingerprintSize; ++b) {
                    const double w = fpm.at(j, b);
                    if (w != 0.0) fp.cells.at(a, b) += x * w;
                }
            }
        }
        return fp;
    }

    // state_hist: per-interval (ln(1+count), ln(1+dollar)) pairs histogrammed
    std::vector<double> xs(static_cast<std::size_t>(n_time));
    std::vector<double> ys(static_cast<std::size_t>(n_time));
    double x_max = 0.0, y_max = 0.0;
    for (int i = 0; i < n_time; ++i) {
        double row_dollar = 0.0;
        for (int j = 0; j < n_price; ++j) row_dollar += agg.dollar.at(i, j);
        xs[static_cast<std::size_t>(i)] =
            log1p_transform(static_cast<double>(agg.msg_count[static_cast<std::size_t>(i)]));
        ys[static_cast<std::size_t>(i)] = log1p_transform(row_dollar);
        x_max = std::max(x_max, xs[static_cast<std::size_t>(i)]);
        y_max = std::max(y_max, ys[static_cast<std::size_t>(i)]);
    }
    Mat counts(kFingerprintSize, kFingerprintSize);
    for (int i = 0; i < n_time; ++i) {
        const int bx = x_max > 0.0
                           ? std::min(kFingerprintSize - 1,
                                      static_cast<int>(xs[static_cast<std::size_t>(i)] / x_max *
                                                       kFingerprintSize))
                           : 0;
        const int by = y_max > 0.0
                           ? std::min(kFingerprintSize - 1,
                                      static_cast<int>(ys[static_cast<std::size_t>(i)] / y_max *
                                                       kFingerprintSize))
                           : 0;
        counts.at(bx, by) += 1.0;
    }
    for (std::size_t i = 0; i < counts.size(); ++i)
        fp.cells.v[i] = log1p_transform(counts.v[i]);
    return fp;
}

// ---------------------------------------------------------------------------
// fingerprint file format
// ---------------------------------------------------------------------------
//
//   FPRINT 1 rows=96 cols=96 day=<label> family=<market|etf> mode=<mode>
//   96 lines of 96 space-separated cell values
//
// Values are written in shortest round-trip form, so read(write(fp)) == fp
// bit for bit.

struct FingerprintFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void write_fingerprint(const Fingerprint& fp, std::ostream& out) {
    out << "FPRINT 1 rows=" << fp.cells.rows << " cols=" << fp.cells.cols
        << " day=" << fp.day_label << " family=" << to_string(fp.family)
        << " mode=" << to_string(fp.mode) << '\n';
    for (int r = 0; r < fp.cells.rows; ++r) {
        for (int c = 0; c < fp.cells.cols; ++c) {
            if (c) out << ' ';
            out << format_double(fp.cells.at(r, c));
        }
        out << '\n';
    }
}

inline Fingerprint read_fingerprint(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw FingerprintFormatError("empty input, expected FPRINT header");

    std::map<std::string, std::string> kv;
    std::string magic, version;
    {
        std::istringstream hs(header);
        hs >> magic >> version;
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    if (magic != "FPRINT")
        throw FingerprintFormatError("bad magic \"" + magic + "\", expected FPRINT");
    if (version != "1")
        throw FingerprintFormatError("unsupported version " + version + ", expected 1");

    Fingerprint fp;
    int rows = 0, cols = 0;
    try {
        rows = std::stoi(kv.at("rows"));
        cols = std::stoi(kv.at("cols"));
    } catch (const std::exception&) {
        throw FingerprintFormatError("header missing rows=/cols=");
    }
    if (rows != kFingerprintSize || cols != kFingerprintSize)
        throw FingerprintFormatError("dimension mismatch: expected 96x96, found " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
    fp.day_label = kv.count("day") ? kv["day"] : "";
    if (auto f = family_from_string(kv.count("family") ? kv["family"] : ""))
        fp.family = *f;
    else
        throw FingerprintFormatError("bad family in header");
    if (auto m = mode_from_string(kv.count("mode") ? kv["mode"] : ""))
        fp.mode = *m;
    else
        throw FingerprintFormatError("bad mode in header");

    fp.cells = Mat(rows, cols);
    std::string line;
    for (int r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw FingerprintFormatError("truncated file: expected " + std::to_string(rows) +
                                         " rows, found " + std::to_string(r));
        std::istringstream ls(line);
        std::string cell;
        for (int c = 0; c < cols; ++c) {
            if (!(ls >> cell))
                throw FingerprintFormatError("row " + std::to_string(r) + ": expected " +
                                             std::to_string(cols) + " cells, found " +
                                             std::to_string(c));
            const auto val = parse_double(cell);
            if (!val)
                throw FingerprintFormatError("row " + std::to_string(r) + ": bad cell \"" +
                                             cell + "\"");
            fp.cells.at(r, c) = *val;
        }
    }
    return fp;
}

} // namespace finprint
