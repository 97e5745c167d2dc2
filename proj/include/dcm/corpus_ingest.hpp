#pragma once

#include "dcm/dates.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace dcm {

struct RawTweet {
    std::string text;
    Date day;  // UTC calendar day of the timestamp
    std::optional<std::string> location_tag;
    std::optional<std::string> lang_hint;
};

struct DatedTweet {
    int day = 0;  // ordinal within the timeframe
    RawTweet tweet;
};

// Counts every non-blank line exactly once:
// read == yielded + skipped_parse + skipped_geo + skipped_time.
struct IngestSummary {
    std::size_t read = 0;
    std::size_t yielded = 0;
    std::size_t skipped_parse = 0;
    std::size_t skipped_geo = 0;
    std::size_t skipped_time = 0;
};

// Lowercased place names; a tweet passes when its location tag contains any of
// them (case-insensitive). An empty filter disables geo filtering.
using GeoFilter = std::vector<std::string>;

// Parses one JSON-lines record. Returns nullopt on malformed JSON, a missing
// or non-string `text`/`ts`, or an unparseable timestamp.
std::optional<RawTweet> parse_tweet_line(const std::string& line);

bool matches_geo(const RawTweet& tweet, const GeoFilter& filter);

// Single-pass reader over a JSON-lines tweet file.
class TweetReader {
public:
    TweetReader(const std::filesystem::path& path, Timeframe timeframe, GeoFilter geo_filter = {});

    std::optional<DatedTweet> next();
    const IngestSummary& summary() const { return summary_; }

private:
    std::ifstream in_;
    Timeframe timeframe_;
    GeoFilter geo_;
    IngestSummary summary_;
};

struct LoadedTweets {
    std::vector<DatedTweet> tweets;
    IngestSummary summary;
};

LoadedTweets load_tweets(const std::filesystem::path& path, Timeframe timeframe, GeoFilter geo_filter = {});

struct GsrVector {
    std::vector<std::int64_t> counts;  // one entry per timeframe day
};

struct GsrLoad {
    GsrVector gsr;
    std::vector<std::string> warnings;
};

// Reads `date,count` CSV rows into a dense per-day vector. Duplicate dates and
// negative counts are fatal; dates outside the timeframe are skipped with a
// warning.
GsrLoad load_gsr(const std::filesystem::path& path, Timeframe timeframe);

} // namespace dcm
