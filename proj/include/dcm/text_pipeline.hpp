#pragma once

#include "dcm/corpus_ingest.hpp"
#include "dcm/feature_id.hpp"
#include "dcm/lancaster.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dcm {

using StopwordSet = std::unordered_set<std::string>;
using LemmaLexicon = std::unordered_map<std::string, std::string>;

// Tweets without a language hint are rejected when more than this share of
// their non-whitespace characters belong to non-Latin scripts.
inline constexpr double kMaxNonLatinShare = 0.20;

StopwordSet load_stopwords(const std::filesystem::path& path);
LemmaLexicon load_lemma_lexicon(const std::filesystem::path& path);

// Share of non-whitespace code points outside the Latin script. Punctuation,
// symbols and emoji count as script-neutral (Latin).
double non_latin_share(std::string_view utf8_text);

bool contains_url(std::string_view text);

// Returns nullopt when the tweet is rejected (non-English hint, URL, or too
// much non-Latin text). Otherwise strips HTML tags, hashtags, punctuation and
// non-Latin characters, lowercases, splits on whitespace and drops stopwords.
std::optional<std::vector<std::string>> clean_tweet(std::string_view text,
                                                    const std::optional<std::string>& lang_hint,
                                                    const StopwordSet& stopwords);
std::optional<std::vector<std::string>> clean_tweet(const RawTweet& raw, const StopwordSet& stopwords);

std::string lemmatize(const std::string& token, const LemmaLexicon& lexicon);

// Everything needed to turn raw text into normalized tokens.
struct TextResources {
    StopwordSet stopwords;
    LemmaLexicon lemmas;
    LancasterStemmer stemmer;

    struct Paths {
        std::filesystem::path stopwords;
        std::filesystem::path lemmas;
        std::filesystem::path stem_rules;
    };
    static Paths bundled_paths();
    static TextResources load(const Paths& paths);
    static TextResources bundled() { return load(bundled_paths()); }

    std::string normalize(const std::string& token) const;
    // clean -> lemmatize -> stem. nullopt when the tweet is rejected.
    std::optional<std::vector<std::string>> tokens_of(const RawTweet& raw) const;
};

// Multiset of features; a feature occurring twice in one token list appears twice.
std::vector<FeatureId> extract_features(const std::vector<std::string>& tokens, WordForm form);

} // namespace dcm
