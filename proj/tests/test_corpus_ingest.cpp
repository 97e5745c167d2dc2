#include "dcm/corpus_ingest.hpp"
#include "dcm/error.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace dcm;
using dcm::test::TempDir;
using dcm::test::write_file;

namespace {

Date d(const char* s) { return *parse_date(s); }

}

TEST_CASE("dates: parse and format") {
    CHECK(format_date(d("2016-02-29")) == "2016-02-29");
    CHECK_FALSE(parse_date("2015-02-29"));
    CHECK_FALSE(parse_date("2016-13-01"));
    CHECK_FALSE(parse_date("2016-1-01"));
    CHECK_FALSE(parse_date(""));
}

TEST_CASE("dates: instants map to their UTC day") {
    CHECK(parse_utc_day("2016-03-05") == d("2016-03-05"));
    CHECK(parse_utc_day("2016-03-05T23:59:59Z") == d("2016-03-05"));
    CHECK(parse_utc_day("2016-03-05 10:00:00") == d("2016-03-05"));
    CHECK(parse_utc_day("2016-03-05T10:00:00.123Z") == d("2016-03-05"));
    // 08:00 at +10:00 is 22:00 the previous day in UTC.
    CHECK(parse_utc_day("2016-03-05T08:00:00+10:00") == d("2016-03-04"));
    CHECK(parse_utc_day("2016-03-05T20:00:00-0500") == d("2016-03-06"));
    CHECK(parse_utc_day("2016-03-05T20:00-05") == d("2016-03-06"));
    CHECK_FALSE(parse_utc_day("2016-03-05T25:00:00Z"));
    CHECK_FALSE(parse_utc_day("yesterday"));
    CHECK_FALSE(parse_utc_day("2016-03-05T10:00:00Q"));
}

TEST_CASE("timeframe: ordinals are total and invertible inside the frame") {
    const auto tf = Timeframe::parse("2016-01-30", "2016-02-02");
    CHECK(tf.days() == 4);
    CHECK(tf.last() == d("2016-02-02"));
    CHECK_FALSE(tf.ordinal(d("2016-01-29")));
    CHECK_FALSE(tf.ordinal(d("2016-02-03")));
    for (int i = 0; i < tf.days(); ++i) CHECK(tf.ordinal(tf.date_of(i)) == i);
    CHECK_THROWS_AS(Timeframe::parse("2016-02-02", "2016-01-30"), Error);
    CHECK_THROWS_AS(Timeframe::parse("2016-02-30", "2016-03-01"), Error);
}

TEST_CASE("parse_tweet_line") {
    auto t = parse_tweet_line(R"({"text":"hi","ts":"2016-01-01T01:00:00Z","loc":"Melbourne","lang":"EN"})");
    REQUIRE(t);
    CHECK(t->text == "hi");
    CHECK(t->location_tag == "Melbourne");
    CHECK(t->lang_hint == "en");
    CHECK(parse_tweet_line(R"({"text":"hi","ts":"2016-01-01"})"));
    CHECK_FALSE(parse_tweet_line(R"({"text":"hi"})"));
    CHECK_FALSE(parse_tweet_line(R"({"ts":"2016-01-01"})"));
    CHECK_FALSE(parse_tweet_line(R"({"text":5,"ts":"2016-01-01"})"));
    CHECK_FALSE(parse_tweet_line(R"({"text":"hi","ts":"soon"})"));
    CHECK_FALSE(parse_tweet_line("not json"));
    CHECK_FALSE(parse_tweet_line("[1,2]"));
}

TEST_CASE("load_tweets: timeframe, geo filter and summary") {
    TempDir dir("ingest");
    const auto path = dir / "tweets.jsonl";
    write_file(path,
               R"({"text":"inside","ts":"2016-01-01T10:00:00Z","loc":"Melbourne, Victoria"})"
               "\n"
               R"({"text":"day before","ts":"2015-12-31T23:59:59Z","loc":"Melbourne"})"
               "\n"
               R"({"text":"other city","ts":"2016-01-02","loc":"Sydney"})"
               "\n"
               R"({"text":"no location","ts":"2016-01-02"})"
               "\n"
               "\n"
               R"({"text":"upper case","ts":"2016-01-03","loc":"MELBOURNE"})"
               "\n"
               "{broken\n");
    const auto tf = Timeframe::parse("2016-01-01", "2016-01-03");

    const auto filtered = load_tweets(path, tf, {"melbourne"});
    REQUIRE(filtered.tweets.size() == 2);
    CHECK(filtered.tweets[0].tweet.text == "inside");
    CHECK(filtered.tweets[0].day == 0);
    CHECK(filtered.tweets[1].day == 2);
    const auto& s = filtered.summary;
    CHECK(s.read == 6);  // the blank line is not a record
    CHECK(s.skipped_parse == 1);
    CHECK(s.skipped_time == 1);
    CHECK(s.skipped_geo == 2);
    CHECK(s.read == s.yielded + s.skipped_parse + s.skipped_geo + s.skipped_time);

    const auto unfiltered = load_tweets(path, tf);
    CHECK(unfiltered.tweets.size() == 4);
}

TEST_CASE("load_tweets: 10 records with 2 malformed yield 8") {
    TempDir dir("ingest10");
    std::string body;
    for (int i = 0; i < 10; ++i) {
        if (i == 3 || i == 7) body += R"({"text":"missing ts"})" "\n";
        else body += R"({"text":"t)" + std::to_string(i) + R"(","ts":"2016-01-0)" + std::to_string(1 + i % 3) + "\"}\n";
    }
    write_file(dir / "t.jsonl", body);
    const auto r = load_tweets(dir / "t.jsonl", Timeframe::parse("2016-01-01", "2016-01-05"));
    CHECK(r.tweets.size() == 8);
    CHECK(r.summary.skipped_parse == 2);
    CHECK(r.summary.read == 10);
}

TEST_CASE("load_tweets: unreadable file is fatal") {
    CHECK_THROWS_AS(load_tweets("/nonexistent/tweets.jsonl", Timeframe::parse("2016-01-01", "2016-01-02")), Error);
}

TEST_CASE("load_gsr") {
    TempDir dir("gsr");
    const auto tf = Timeframe::parse("2016-01-01", "2016-01-05");

    SUBCASE("densification") {
        write_file(dir / "g.csv", "date,count\n2016-01-04,1\n2016-01-01,2\n");
        CHECK(load_gsr(dir / "g.csv", tf).gsr.counts == std::vector<std::int64_t>{2, 0, 0, 1, 0});
    }
    SUBCASE("empty file is all zeros") {
        write_file(dir / "g.csv", "");
        CHECK(load_gsr(dir / "g.csv", Timeframe::parse("2016-01-01", "2016-01-03")).gsr.counts ==
              std::vector<std::int64_t>{0, 0, 0});
    }
    SUBCASE("header only, no header") {
        write_file(dir / "g.csv", "date,count\n");
        CHECK(load_gsr(dir / "g.csv", tf).gsr.counts == std::vector<std::int64_t>(5, 0));
        write_file(dir / "g.csv", "2016-01-02,7\n");
        CHECK(load_gsr(dir / "g.csv", tf).gsr.counts == std::vector<std::int64_t>{0, 7, 0, 0, 0});
    }
    SUBCASE("duplicate date is fatal") {
        write_file(dir / "g.csv", "date,count\n2016-01-01,2\n2016-01-01,1\n");
        CHECK_THROWS_AS(load_gsr(dir / "g.csv", tf), Error);
    }
    SUBCASE("negative count is fatal") {
        write_file(dir / "g.csv", "date,count\n2016-01-01,-1\n");
        CHECK_THROWS_AS(load_gsr(dir / "g.csv", tf), Error);
    }
    SUBCASE("malformed rows are fatal") {
        write_file(dir / "g.csv", "date,count\n2016-01-01\n");
        CHECK_THROWS_AS(load_gsr(dir / "g.csv", tf), Error);
        write_file(dir / "g.csv", "date,count\n2016-01-01,two\n");
        CHECK_THROWS_AS(load_gsr(dir / "g.csv", tf), Error);
    }
    SUBCASE("dates outside the timeframe are skipped with a warning") {
        write_file(dir / "g.csv", "date,count\n2015-12-31,4\n2016-01-02,1\n");
        const auto r = load_gsr(dir / "g.csv", tf);
        CHECK(r.gsr.counts == std::vector<std::int64_t>{0, 1, 0, 0, 0});
        CHECK(r.warnings.size() == 1);
    }
    SUBCASE("row order does not matter") {
        std::vector<std::string> rows = {"2016-01-01,3", "2016-01-02,0", "2016-01-03,5", "2016-01-05,1"};
        std::mt19937_64 rng(7);
        std::vector<std::int64_t> first;
        for (int trial = 0; trial < 10; ++trial) {
            std::shuffle(rows.begin(), rows.end(), rng);
            std::string body = "date,count\n";
            for (const auto& r : rows) body += r + "\n";
            write_file(dir / "g.csv", body);
            const auto counts = load_gsr(dir / "g.csv", tf).gsr.counts;
            if (trial == 0) first = counts;
            CHECK(counts == first);
        }
        CHECK(first == std::vector<std::int64_t>{3, 0, 5, 0, 1});
    }
}
