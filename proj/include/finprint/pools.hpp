#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finprint/fingerprint.hpp"
#include "finprint/rng.hpp"

// Training/testing pool composition: mixes of all-market and ETF-only daily
// fingerprints at fixed proportions (tr1..tr5 and tes1..tes5).

namespace finprint {

struct MixSpec {
    std::string label;
    int market_percent = 0;
    int etf_percent = 0;

    double market_fraction() const { return market_percent / 100.0; }
    double etf_fraction() const { return etf_percent / 100.0; }

    // round half away from zero on the market count; ETF takes the rest
    int market_count(int pool_size) const {
        return static_cast<int>((static_cast<std::int64_t>(pool_size) * market_percent + 50) / 100);
    }
    int etf_count(int pool_size) const { return pool_size - market_count(pool_size); }

    friend bool operator==(const MixSpec&, const MixSpec&) = default;
};

inline std::vector<MixSpec> standard_mixes() {
    return {
        {"tr1", 100, 0}, {"tr2", 80, 20}, {"tr3", 60, 40}, {"tr4", 40, 60}, {"tr5", 20, 80},
        {"tes1", 0, 100}, {"tes2", 20, 80}, {"tes3", 40, 60}, {"tes4", 60, 40}, {"tes5", 80, 20},
    };
}

inline MixSpec mix_by_label(const std::string& label) {
    for (const auto& m : standard_mixes())
        if (m.label == label) return m;
    throw std::invalid_argument("unknown mix label \"" + label + "\"");
}

// tr_k and tes_k swap market and ETF shares; the first row (100:0 vs 0:100)
// is the fully mirrored pair.
inline std::vector<std::pair<MixSpec, MixSpec>> mirror_pairs() {
    std::vector<std::pair<MixSpec, MixSpec>> out;
    for (int k = 1; k <= 5; ++k)
        out.emplace_back(mix_by_label("tr" + std::to_string(k)),
                         mix_by_label("tes" + std::to_string(k)));
    return out;
}

struct PoolMember {
    std::string day_label;
    Family family = Family::market;
    std::string source_path; // optional, for manifests
    Fingerprint fingerprint;
};

struct SamplePool {
    MixSpec spec;
    std::vector<PoolMember> members; // market draws first, then etf draws
    int market_members = 0;
    int etf_members = 0;
};

struct PoolCapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// seeded partial Fisher-Yates; returns the first k indices of a shuffle of 0..n-1
inline std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k,
                                                         SplitMix64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

} // namespace detail

inline SamplePool build_pool(const MixSpec& spec, const std::vector<Fingerprint>& market_days,
                             const std::vector<Fingerprint>& etf_days, int pool_size,
                             std::uint64_t seed) {
    if (pool_size <= 0) throw std::invalid_argument("pool_size must be positive");
    const int want_market = spec.market_count(pool_size);
    const int want_etf = spec.etf_count(pool_size);
    if (static_cast<std::size_t>(want_market) > market_days.size())
        throw PoolCapacityError(spec.label + ": need " + std::to_string(want_market) +
                                " market fingerprints, have " +
                                std::to_string(market_days.size()));
    if (static_cast<std::size_t>(want_etf) > etf_days.size())
        throw PoolCapacityError(spec.label + ": need " + std::to_string(want_etf) +
                                " etf fingerprints, have " + std::to_string(etf_days.size()));

    SamplePool pool;
    pool.spec = spec;
    pool.market_members = want_market;
    pool.etf_members = want_etf;

    SplitMix64 rng(derive_seed(seed, 0x706f6f6cULL)); // "pool"
    for (std::size_t i : detail::draw_without_replacement(
             market_days.size(), static_cast<std::size_t>(want_market), rng)) {
        const auto& fp = market_days[i];
        pool.members.push_back({fp.day_label, fp.family, "", fp});
    }
    for (std::size_t i : detail::draw_without_replacement(
             etf_days.size(), static_cast<std::size_t>(want_etf), rng)) {
        const auto& fp = etf_days[i];
        pool.members.push_back({fp.day_label, fp.family, "", fp});
    }
    return pool;
}

// Pixelwise mean of the members: the single matrix that stands for the pool
// in the affinity metrics.
inline Mat pool_image(const SamplePool& pool) {
    if (pool.members.empty()) throw std::invalid_argument("pool_image: empty pool");
    Mat mean(kFingerprintSize, kFingerprintSize);
    for (const auto& m : pool.members)
        for (std::size_t i = 0; i < mean.size(); ++i) mean.v[i] += m.fingerprint.cells.v[i];
    const double inv = 1.0 / static_cast<double>(pool.members.size());
    for (double& x : mean.v) x *= inv;
    return mean;
}

// ---------------------------------------------------------------------------
// manifest CSV: pool_label,member_index,day,family,fingerprint_path
// ---------------------------------------------------------------------------

inline void write_pool_manifest(const SamplePool& pool, std::ostream& out) {
    out << "pool_label,member_index,day,family,fingerprint_path\n";
    for (std::size_t i = 0; i < pool.members.size(); ++i) {
        const auto& m = pool.members[i];
        out << pool.spec.label << ',' << i << ',' << m.day_label << ','
            << to_string(m.family) << ',' << m.source_path << '\n';
    }
}

struct PoolManifestRow {
    std::string pool_label;
    int member_index = 0;
    std::string day_label;
    Family family = Family::market;
    std::string fingerprint_path;
};

inline std::vector<PoolManifestRow> read_pool_manifest(std::istream& in) {
    std::vector<PoolManifestRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) { first = false; continue; } // header
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (f.size() != 5)
            throw std::runtime_error("pool manifest: expected 5 columns, got " +
                                     std::to_string(f.size()));
        PoolManifestRow row;
        row.pool_label = f[0];
        row.member_index = std::stoi(f[1]);
        row.day_label = f[2];
        if (auto fam = family_from_string(f[3])) row.family = *fam;
        else throw std::runtime_error("pool manifest: bad family \"" + f[3] + "\"");
        row.fingerprint_path = f[4];
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace finprint
