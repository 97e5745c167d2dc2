#include "dcm/synthetic.hpp"

#include "dcm/dates.hpp"
#include "dcm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

namespace dcm {

namespace {

using Rng = std::mt19937_64;

std::size_t draw_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng));
}

// Pronounceable pseudo-words ending in a letter no Lancaster rule touches,
// so they pass through lemmatization and stemming unchanged.
std::string make_word(Rng& rng) {
    static constexpr const char* kConsonants = "bdfgklmnprstvz";
    static constexpr const char* kVowels = "aeiu";
    static constexpr const char* kEndings = "okw";
    std::string w;
    const auto syllables = 2 + draw_index(rng, 2);
    for (std::size_t i = 0; i < syllables; ++i) {
        w += kConsonants[draw_index(rng, 14)];
        w += kVowels[draw_index(rng, 4)];
    }
    w += kEndings[draw_index(rng, 3)];
    return w;
}

constexpr const char* kFiller[] = {"the", "and", "is", "at", "on", "we", "our", "to", "with", "this", "a", "so"};

std::string timestamp(Date day, Rng& rng) {
    const std::chrono::year_month_day ymd{day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02zu:%02zu:%02zuZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), draw_index(rng, 24),
                  draw_index(rng, 60), draw_index(rng, 60));
    return buf;
}

std::string tweet_text(const std::vector<std::string>& words, Rng& rng) {
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!text.empty()) text += ' ';
        if (draw_index(rng, 3) == 0) {
            text += kFiller[draw_index(rng, std::size(kFiller))];
            text += ' ';
        }
        std::string w = words[i];
        if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        text += w;
    }
    if (draw_index(rng, 2) == 0) text += draw_index(rng, 2) ? "!" : ".";
    return text;
}

} // namespace

void SyntheticSpec::validate() const {
    if (days < 2) throw Error("synthetic corpus needs at least 2 days");
    if (event_days > static_cast<std::size_t>(days)) throw Error("more event days than days");
    if (planted_clusters > 0 && synonyms == 0) throw Error("planted clusters need at least one synonym");
    if (background_rate < 0.0) throw Error("background rate must be >= 0");
    if (planted_clusters > 0 && !(spike_magnitude > background_rate) && spike_magnitude != 0.0) {
        throw Error("spike magnitude must exceed the background rate");
    }
    if (events_per_day < 1) throw Error("events per event day must be >= 1");
    if (!parse_date(start_date)) throw Error("invalid synthetic start date '" + start_date + "'");
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir) {
    spec.validate();
    Rng rng(spec.seed);
    const auto start = *parse_date(spec.start_date);
    const auto days = static_cast<std::size_t>(spec.days);

    SyntheticCorpus out;
    {
        std::vector<int> all(days);
        for (std::size_t d = 0; d < days; ++d) all[d] = static_cast<int>(d);
        for (std::size_t i = 0; i < spec.event_days; ++i) std::swap(all[i], all[i + draw_index(rng, days - i)]);
        out.event_days.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(spec.event_days));
        std::sort(out.event_days.begin(), out.event_days.end());
    }
    out.gsr.assign(days, 0);
    for (int d : out.event_days) out.gsr[static_cast<std::size_t>(d)] = spec.events_per_day;

    std::set<std::string> used;
    const auto fresh = [&] {
        while (true) {
            auto w = make_word(rng);
            if (used.insert(w).second) return w;
        }
    };
    for (std::size_t i = 0; i < spec.background_features; ++i) out.background_tokens.push_back(fresh());
    out.planted.resize(spec.planted_clusters);
    for (auto& cluster : out.planted) {
        for (std::size_t s = 0; s < spec.synonyms; ++s) cluster.push_back(fresh());
    }

    std::vector<bool> is_event(days, false);
    for (int d : out.event_days) is_event[static_cast<std::size_t>(d)] = true;
    const double spike_share = spec.synonyms ? spec.spike_magnitude / static_cast<double>(spec.synonyms) : 0.0;

    std::filesystem::create_directories(dir);
    std::ofstream corpus(dir / "corpus.jsonl", std::ios::binary);
    if (!corpus) throw Error("cannot write synthetic corpus in '" + dir.string() + "'");

    std::vector<std::vector<std::int64_t>> planted_counts;
    for (std::size_t d = 0; d < days; ++d) {
        std::vector<std::string> bag;
        const auto draw = [&](const std::string& token, double mean) {
            const auto c = mean > 0 ? std::poisson_distribution<std::int64_t>(mean)(rng) : 0;
            for (std::int64_t i = 0; i < c; ++i) bag.push_back(token);
            return c;
        };
        for (const auto& t : out.background_tokens) draw(t, spec.background_rate);
        std::size_t idx = 0;
        for (const auto& cluster : out.planted) {
            for (const auto& t : cluster) {
                const auto c = draw(t, spec.background_rate + (is_event[d] ? spike_share : 0.0));
                if (planted_counts.size() <= idx) planted_counts.emplace_back(days, 0);
                planted_counts[idx++][d] = c;
            }
        }
        for (std::size_t i = bag.size(); i > 1; --i) std::swap(bag[i - 1], bag[draw_index(rng, i)]);

        const Date date = start + std::chrono::days{static_cast<int>(d)};
        // Token occurrences are dealt into tweets of 3-7 words. A tweet never
        // repeats a token so keyword counts equal the planted counts.
        std::size_t pos = 0;
        while (pos < bag.size()) {
            const auto len = std::min(bag.size() - pos, 3 + draw_index(rng, 5));
            std::vector<std::string> words;
            std::set<std::string> seen;
            std::size_t take = pos;
            for (; take < bag.size() && words.size() < len; ++take) {
                if (!seen.insert(bag[take]).second) break;
                words.push_back(bag[take]);
            }
            pos = take;
            nlohmann::ordered_json j;
            j["text"] = tweet_text(words, rng);
            j["ts"] = timestamp(date, rng);
            j["loc"] = spec.location;
            j["lang"] = "en";
            corpus << j.dump() << '\n';
        }
        for (std::size_t i = 0; i < spec.decoys_per_day && !out.background_tokens.empty(); ++i) {
            std::vector<std::string> words;
            for (int w = 0; w < 4; ++w) words.push_back(out.background_tokens[draw_index(rng, out.background_tokens.size())]);
            nlohmann::ordered_json j;
            if (i % 2 == 0) {
                j["text"] = tweet_text(words, rng) + " https://t.co/" + make_word(rng);
                j["ts"] = timestamp(date, rng);
                j["loc"] = spec.location;
            } else {
                j["text"] = tweet_text(words, rng);
                j["ts"] = timestamp(date, rng);
                j["loc"] = "Sydney, New South Wales";
            }
            corpus << j.dump() << '\n';
        }
    }
    out.planted_counts = std::move(planted_counts);

    std::ofstream gsr(dir / "gsr.csv", std::ios::binary);
    gsr << "date,count\n";
    for (std::size_t d = 0; d < days; ++d) {
        if (out.gsr[d] != 0) gsr << format_date(start + std::chrono::days{static_cast<int>(d)}) << ',' << out.gsr[d] << '\n';
    }

    std::ofstream planted(dir / "planted.tsv", std::ios::binary);
    for (std::size_t c = 0; c < out.planted.size(); ++c) {
        for (const auto& t : out.planted[c]) planted << c << '\t' << t << '\n';
    }
    if (!corpus || !gsr || !planted) throw Error("failed writing synthetic corpus to '" + dir.string() + "'");
    return out;
}

} // namespace dcm
