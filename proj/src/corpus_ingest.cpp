#include "dcm/corpus_ingest.hpp"

#include "dcm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace dcm {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<RawTweet> parse_tweet_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    const auto text = j.find("text");
    const auto ts = j.find("ts");
    if (text == j.end() || !text->is_string() || ts == j.end() || !ts->is_string()) return std::nullopt;
    const auto day = parse_utc_day(ts->get<std::string>());
    if (!day) return std::nullopt;

    RawTweet tweet{text->get<std::string>(), *day, std::nullopt, std::nullopt};
    if (const auto loc = j.find("loc"); loc != j.end() && !loc->is_null()) {
        if (!loc->is_string()) return std::nullopt;
        tweet.location_tag = loc->get<std::string>();
    }
    if (const auto lang = j.find("lang"); lang != j.end() && !lang->is_null()) {
        if (!lang->is_string()) return std::nullopt;
        tweet.lang_hint = lower(lang->get<std::string>());
    }
    return tweet;
}

bool matches_geo(const RawTweet& tweet, const GeoFilter& filter) {
    if (filter.empty()) return true;
    if (!tweet.location_tag) return false;
    const auto loc = lower(*tweet.location_tag);
    return std::any_of(filter.begin(), filter.end(),
                       [&](const std::string& place) { return loc.find(lower(place)) != std::string::npos; });
}

TweetReader::TweetReader(const std::filesystem::path& path, Timeframe timeframe, GeoFilter geo_filter)
    : in_(path), timeframe_(timeframe), geo_(std::move(geo_filter)) {
    if (!in_) throw Error("cannot open tweet corpus '" + path.string() + "'");
}

std::optional<DatedTweet> TweetReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        if (is_blank(line)) continue;
        ++summary_.read;
        auto tweet = parse_tweet_line(line);
        if (!tweet) {
            ++summary_.skipped_parse;
            continue;
        }
        const auto day = timeframe_.ordinal(tweet->day);
        if (!day) {
            ++summary_.skipped_time;
            continue;
        }
        if (!matches_geo(*tweet, geo_)) {
            ++summary_.skipped_geo;
            continue;
        }
        ++summary_.yielded;
        return DatedTweet{*day, std::move(*tweet)};
    }
    if (in_.bad()) throw Error("read error on tweet corpus");
    return std::nullopt;
}

LoadedTweets load_tweets(const std::filesystem::path& path, Timeframe timeframe, GeoFilter geo_filter) {
    TweetReader reader(path, timeframe, std::move(geo_filter));
    LoadedTweets out;
    while (auto t = reader.next()) out.tweets.push_back(std::move(*t));
    out.summary = reader.summary();
    return out;
}

GsrLoad load_gsr(const std::filesystem::path& path, Timeframe timeframe) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open GSR file '" + path.string() + "'");

    GsrLoad out;
    out.gsr.counts.assign(static_cast<std::size_t>(timeframe.days()), 0);
    std::vector<bool> seen(out.gsr.counts.size(), false);
    std::vector<Date> seen_outside;

    std::string line;
    std::size_t line_no = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (!header_checked) {
            header_checked = true;
            if (lower(std::string(row)) == "date,count") continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) throw Error(where + ": expected `date,count`");
        const auto date_text = trim(row.substr(0, comma));
        const auto count_text = trim(row.substr(comma + 1));
        const auto date = parse_date(date_text);
        if (!date) throw Error(where + ": invalid date '" + std::string(date_text) + "'");
        std::int64_t count = 0;
        auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
            throw Error(where + ": invalid count '" + std::string(count_text) + "'");
        }
        if (count < 0) throw Error(where + ": negative event count " + std::to_string(count));

        const auto day = timeframe.ordinal(*date);
        if (!day) {
            if (std::find(seen_outside.begin(), seen_outside.end(), *date) != seen_outside.end()) {
                throw Error(where + ": duplicate date " + format_date(*date));
            }
            seen_outside.push_back(*date);
            out.warnings.push_back(where + ": date " + format_date(*date) + " outside timeframe, skipped");
            continue;
        }
        const auto idx = static_cast<std::size_t>(*day);
        if (seen[idx]) throw Error(where + ": duplicate date " + format_date(*date));
        seen[idx] = true;
        out.gsr.counts[idx] = count;
    }
    return out;
}

} // namespace dcm
