#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "finprint/pools.hpp"

using namespace finprint;

static std::vector<Fingerprint> make_days(int n, Family family, double value) {
    std::vector<Fingerprint> out;
    for (int i = 0; i < n; ++i) {
        Fingerprint fp;
        fp.cells = Mat(96, 96, value + i);
        fp.day_label = "2020-01-" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1);
        fp.family = family;
        out.push_back(std::move(fp));
    }
    return out;
}

TEST_CASE("standard_mixes: the ten fixed proportions") {
    const auto mixes = standard_mixes();
    REQUIRE(mixes.size() == 10);
    auto pct = [&](const char* label) {
        const auto m = mix_by_label(label);
        return std::pair<int, int>{m.market_percent, m.etf_percent};
    };
    CHECK(pct("tr1") == std::pair<int, int>{100, 0});
    CHECK(pct("tr2") == std::pair<int, int>{80, 20});
    CHECK(pct("tr3") == std::pair<int, int>{60, 40});
    CHECK(pct("tr4") == std::pair<int, int>{40, 60});
    CHECK(pct("tr5") == std::pair<int, int>{20, 80});
    CHECK(pct("tes1") == std::pair<int, int>{0, 100});
    CHECK(pct("tes2") == std::pair<int, int>{20, 80});
    CHECK(pct("tes3") == std::pair<int, int>{40, 60});
    CHECK(pct("tes4") == std::pair<int, int>{60, 40});
    CHECK(pct("tes5") == std::pair<int, int>{80, 20});
    for (const auto& m : mixes) {
        CHECK(m.market_percent + m.etf_percent == 100);
        CHECK(m.market_fraction() + m.etf_fraction() == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(mix_by_label("tr1").market_fraction() == 1.0);
    CHECK(mix_by_label("tes5").market_fraction() == 0.8);
    CHECK_THROWS_AS(mix_by_label("tr9"), std::invalid_argument);
}

TEST_CASE("mirror property: tr_k and tes_k swap market and ETF shares") {
    for (const auto& [tr, tes] : mirror_pairs()) {
        CHECK(tr.market_percent == tes.etf_percent);
        CHECK(tr.etf_percent == tes.market_percent);
    }
}

TEST_CASE("composition counts: rounding rule for pool sizes 5 and 10") {
    for (int pool_size : {5, 10}) {
        for (const auto& m : standard_mixes()) {
            const int mk = m.market_count(pool_size);
            const int et = m.etf_count(pool_size);
            CHECK(mk + et == pool_size);
            // round half away from zero
            CHECK(mk == static_cast<int>(std::llround(pool_size * m.market_fraction())));
        }
    }
    // odd size exercises the tie: 3 * 0.5 has no tie, but 2 * 0.5 etc.
    MixSpec half{"h", 50, 50};
    CHECK(half.market_count(5) == 3); // 2.5 rounds away from zero
    CHECK(half.etf_count(5) == 2);
}

TEST_CASE("build_pool: compositions and determinism") {
    const auto market = make_days(6, Family::market, 1.0);
    const auto etf = make_days(6, Family::etf, 100.0);

    const auto p_tr1 = build_pool(mix_by_label("tr1"), market, etf, 5, 9);
    CHECK(p_tr1.market_members == 5);
    CHECK(p_tr1.etf_members == 0);
    CHECK(p_tr1.members.size() == 5);
    for (const auto& m : p_tr1.members) CHECK(m.family == Family::market);

    const auto p_tes1 = build_pool(mix_by_label("tes1"), market, etf, 5, 9);
    CHECK(p_tes1.market_members == 0);
    CHECK(p_tes1.etf_members == 5);

    const auto again = build_pool(mix_by_label("tr1"), market, etf, 5, 9);
    REQUIRE(again.members.size() == p_tr1.members.size());
    for (std::size_t i = 0; i < again.members.size(); ++i)
        CHECK(again.members[i].day_label == p_tr1.members[i].day_label);

    const auto other_seed = build_pool(mix_by_label("tr2"), market, etf, 5, 10);
    CHECK(other_seed.market_members == 4);
    CHECK(other_seed.etf_members == 1);
}

TEST_CASE("build_pool: members are distinct (day, family) fingerprints") {
    const auto market = make_days(8, Family::market, 1.0);
    const auto etf = make_days(8, Family::etf, 100.0);
    const auto pool = build_pool(mix_by_label("tr3"), market, etf, 5, 123);
    std::set<std::pair<std::string, int>> seen;
    for (const auto& m : pool.members)
        CHECK(seen.insert({m.day_label, static_cast<int>(m.family)}).second);
}

TEST_CASE("build_pool: capacity error names required vs available") {
    const auto market = make_days(2, Family::market, 1.0);
    const auto etf = make_days(5, Family::etf, 100.0);
    CHECK_THROWS_WITH_AS(build_pool(mix_by_label("tr1"), market, etf, 5, 1),
                         doctest::Contains("need 5 market fingerprints, have 2"),
                         PoolCapacityError);
}

TEST_CASE("pool_image: pixelwise mean of the members") {
    auto market = make_days(2, Family::market, 0.0); // values 0 and 1
    const auto pool = build_pool(mix_by_label("tr1"), market, {}, 2, 4);
    const Mat img = pool_image(pool);
    for (double v : img.v) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("pool manifest: csv round-trip") {
    auto market = make_days(5, Family::market, 1.0);
    auto etf = make_days(5, Family::etf, 2.0);
    auto pool = build_pool(mix_by_label("tr2"), market, etf, 5, 7);
    for (std::size_t i = 0; i < pool.members.size(); ++i)
        pool.members[i].source_path = "fp/" + pool.members[i].day_label + ".fp";

    std::ostringstream out;
    write_pool_manifest(pool, out);
    std::istringstream in(out.str());
    const auto rows = read_pool_manifest(in);
    REQUIRE(rows.size() == pool.members.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].pool_label == "tr2");
        CHECK(rows[i].member_index == static_cast<int>(i));
        CHECK(rows[i].day_label == pool.members[i].day_label);
        CHECK(rows[i].family == pool.members[i].family);
        CHECK(rows[i].fingerprint_path == pool.members[i].source_path);
    }
}
