#include "dcm/checkpoint.hpp"
#include "dcm/correlation.hpp"
#include "dcm/count_matrix.hpp"
#include "dcm/error.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <random>

using namespace dcm;

namespace {

FeatureId kw(const std::string& t) { return {WordForm::keyword(), {t}}; }

using Stream = std::vector<std::pair<int, std::vector<FeatureId>>>;

} // namespace

TEST_CASE("accumulate: examples") {
    const Stream s = {{0, {kw("f"), kw("f")}}, {0, {kw("f")}}, {2, {kw("f")}}};
    const auto m = accumulate(3, s);
    CHECK(m.size() == 1);
    CHECK(m.dense_row(kw("f")) == DailyCounts{3, 0, 1});
    CHECK(accumulate(3, Stream{}).empty());
}

TEST_CASE("accumulate: naive counter oracle, order invariance, partial merges") {
    std::mt19937_64 rng(3);
    const int days = 6;
    std::uniform_int_distribution<int> day(0, days - 1), feat(0, 4), len(0, 5);
    Stream stream;
    for (int i = 0; i < 20; ++i) {
        std::vector<FeatureId> fs(len(rng));
        for (auto& f : fs) f = kw(std::string(1, static_cast<char>('p' + feat(rng))));
        stream.emplace_back(day(rng), fs);
    }

    // Oracle: one pass per (feature, day) cell.
    std::set<FeatureId> ids;
    for (const auto& [d, fs] : stream) ids.insert(fs.begin(), fs.end());
    const auto m = accumulate(days, stream);
    CHECK(m.size() == ids.size());
    for (const auto& id : ids) {
        DailyCounts expect(days, 0);
        for (int d = 0; d < days; ++d) {
            for (const auto& [sd, fs] : stream) {
                if (sd == d) expect[d] += std::count(fs.begin(), fs.end(), id);
            }
        }
        CHECK(m.dense_row(id) == expect);
    }

    for (int trial = 0; trial < 5; ++trial) {
        auto shuffled = stream;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(accumulate(days, shuffled) == m);

        CountAccumulator a(days), b(days);
        for (std::size_t i = 0; i < shuffled.size(); ++i) (i % 2 ? a : b).add(shuffled[i].first, shuffled[i].second);
        a.merge(b);
        CHECK(a.finish() == m);
    }
}

TEST_CASE("count matrix: row validation") {
    CountMatrix m(3);
    CHECK_THROWS_AS(m.set_row(kw("a"), DailyCounts{1, 2}), Error);
    CHECK_THROWS_AS(m.set_row(kw("a"), DailyCounts{1, -2, 0}), Error);
    CHECK_THROWS_AS(m.row(kw("missing")), Error);
    m.set_row(kw("a"), DailyCounts{0, 2, 0});
    CHECK(m.row(kw("a")).entries.size() == 1);
    CHECK(m.total() == 2);
    CountAccumulator acc(3);
    const std::vector<FeatureId> one = {kw("x")};
    CHECK_THROWS_AS(acc.add(3, one), Error);
}

TEST_CASE("filter_min_count: examples") {
    CountMatrix m(3);
    m.set_row(kw("flat"), DailyCounts{4, 4, 4});
    m.set_row(kw("spike"), DailyCounts{0, 5, 0});
    m.set_row(kw("zero"), DailyCounts{0, 0, 0});
    const auto f = filter_min_count(m, 5);
    CHECK(f.size() == 1);
    CHECK(f.contains(kw("spike")));
    // All-zero rows never survive, even at threshold 0.
    CHECK(filter_min_count(m, 0).size() == 2);
}

TEST_CASE("filter_min_count: brute-force oracle and idempotence") {
    std::mt19937_64 rng(5);
    std::poisson_distribution<int> pois(1.0);
    const int days = 30;
    CountMatrix m(days);
    std::vector<std::pair<FeatureId, DailyCounts>> rows;
    for (int i = 0; i < 1000; ++i) {
        DailyCounts r(days);
        for (auto& c : r) c = pois(rng);
        rows.emplace_back(kw("f" + std::to_string(i)), r);
        m.set_row(rows.back().first, r);
    }
    const auto f = filter_min_count(m, 5);
    std::set<FeatureId> expect;
    for (const auto& [id, r] : rows) {
        bool keep = false;
        for (auto c : r) keep = keep || c >= 5;
        if (keep) expect.insert(id);
    }
    std::set<FeatureId> got;
    for (const auto& [id, r] : f.rows()) got.insert(id);
    CHECK(got == expect);
    CHECK(!expect.empty());
    CHECK(filter_min_count(f, 5) == f);
}

TEST_CASE("select_top_k: examples") {
    const GsrVector gsr{{0, 3, 1, 0, 2}};
    CountMatrix m(5);
    m.set_row(kw("exact"), DailyCounts{0, 3, 1, 0, 2});
    m.set_row(kw("noise"), DailyCounts{1, 0, 2, 1, 0});
    m.set_row(kw("const"), DailyCounts{2, 2, 2, 2, 2});

    const auto top1 = select_top_k(m, gsr, {Metric::Pearson}, 1);
    CHECK(top1.matrix.size() == 1);
    CHECK(top1.matrix.contains(kw("exact")));
    REQUIRE(top1.ranked[0].score);
    CHECK(*top1.ranked[0].score == doctest::Approx(1.0).epsilon(1e-12));

    const auto all = select_top_k(m, gsr, {Metric::Pearson}, 10);
    CHECK(all.ranked.size() == 3);
    CHECK(all.ranked.back().id == kw("const"));
    CHECK_FALSE(all.ranked.back().score);

    CHECK_THROWS_AS(select_top_k(m, gsr, {Metric::Pearson}, 0), Error);
    CHECK_THROWS_AS(select_top_k(m, GsrVector{{1, 2}}, {Metric::Pearson}, 1), Error);
}

TEST_CASE("select_top_k: full-sort oracle") {
    std::mt19937_64 rng(9);
    std::poisson_distribution<int> pois(3.0);
    const int days = 40;
    GsrVector gsr{DailyCounts(days)};
    for (auto& c : gsr.counts) c = pois(rng);
    CountMatrix m(days);
    for (int i = 0; i < 50; ++i) {
        DailyCounts r(days);
        for (auto& c : r) c = pois(rng);
        m.set_row(kw("f" + std::to_string(100 + i)), r);
    }
    for (bool absolute : {false, true}) {
        const auto top = select_top_k(m, gsr, {Metric::Spearman}, 10, absolute);

        std::vector<std::pair<double, FeatureId>> oracle;
        const auto g = to_series(gsr.counts);
        for (const auto& [id, row] : m.rows()) {
            const auto x = to_series(row.dense(days));
            const double s = *spearman(x, g);
            oracle.emplace_back(absolute ? std::abs(s) : s, id);
        }
        std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        REQUIRE(top.ranked.size() == 50);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(top.ranked[i].id == oracle[i].second);
            CHECK(top.matrix.contains(oracle[i].second));
        }
        CHECK(top.matrix.size() == 10);
        for (std::size_t i = 1; i < top.ranked.size(); ++i) {
            const double prev = absolute ? std::abs(*top.ranked[i - 1].score) : *top.ranked[i - 1].score;
            const double cur = absolute ? std::abs(*top.ranked[i].score) : *top.ranked[i].score;
            CHECK(prev >= cur);
        }
    }
}

TEST_CASE("rank_scores: ties broken by feature id") {
    std::vector<ScoredFeature> s = {{kw("c"), 0.5}, {kw("a"), std::nullopt}, {kw("b"), 0.5}, {kw("d"), -0.9}};
    rank_scores(s);
    CHECK(s[0].id == kw("b"));
    CHECK(s[1].id == kw("c"));
    CHECK(s[2].id == kw("d"));
    CHECK(s[3].id == kw("a"));
    rank_scores(s, true);
    CHECK(s[0].id == kw("d"));
}

TEST_CASE("count matrix checkpoint round-trips") {
    dcm::test::TempDir dir("counts");
    CountMatrix m(4);
    m.set_row({WordForm::bag_of_words(2), {"march", "melbourn"}}, DailyCounts{0, 7, 0, 1});
    m.set_row(kw("rally"), DailyCounts{1, 2, 3, 4});
    m.set_row(kw("quiet"), DailyCounts{0, 0, 0, 0});
    write_count_matrix(m, dir / "m.tsv");
    CHECK(dcm::test::read_file(dir / "m.tsv").find("bow:2:march+melbourn\t0,7,0,1\n") != std::string::npos);
    CHECK(read_count_matrix(dir / "m.tsv") == m);

    dcm::test::write_file(dir / "bad.tsv", "keyword:1:a\t1,2\nkeyword:1:b\t1\n");
    CHECK_THROWS_AS(read_count_matrix(dir / "bad.tsv"), Error);
}
