#include "dcm/text_pipeline.hpp"

#include "dcm/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

namespace dcm {

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at `i` and advances `i`. Malformed bytes
// decode to U+FFFD one byte at a time.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kInvalid;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return kInvalid;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
           c == 0x3000 || (c >= 0x2000 && c <= 0x200B);
}

bool is_latin(char32_t c) {
    if (c < 0x250) return true;                        // ASCII, Latin-1, Latin Extended-A/B
    if (c >= 0x1E00 && c <= 0x1EFF) return true;       // Latin Extended Additional
    if (c >= 0x2000 && c <= 0x2BFF) return true;       // punctuation, symbols, arrows, dingbats
    if (c >= 0xFE00 && c <= 0xFE0F) return true;       // variation selectors
    if (c >= 0x1F000 && c <= 0x1FAFF) return true;     // emoji and pictographs
    return false;
}

// Latin-1 Supplement letters U+00C0..U+00FF folded to ASCII; 0 = not a letter.
constexpr const char* kLatin1Fold =
    "aaaaaaaceeeeiiii"  // C0-CF
    "dnooooo\0ouuuuyts"  // D0-DF (D7 is the multiplication sign)
    "aaaaaaaceeeeiiii"  // E0-EF
    "dnooooo\0ouuuuyty"; // F0-FF (F7 is the division sign)

bool ascii_equal_ci(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::string strip_html_tags(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '<') {
            const auto close = text.find('>', i + 1);
            if (close != std::string_view::npos) {
                out += ' ';
                i = close;
                continue;
            }
        }
        if (text[i] == '&') {
            const auto semi = text.find(';', i + 1);
            if (semi != std::string_view::npos && semi - i <= 8) {
                const auto body = text.substr(i + 1, semi - i - 1);
                const bool named = !body.empty() && std::all_of(body.begin(), body.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '#';
                });
                if (named) {
                    out += ' ';
                    i = semi;
                    continue;
                }
            }
        }
        out += text[i];
    }
    return out;
}

bool is_hashtag_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '_';
}

std::string strip_hashtags(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '#') {
            std::size_t j = i + 1;
            while (j < text.size() && is_hashtag_char(text[j])) ++j;
            out += ' ';
            i = j - 1;
            continue;
        }
        out += text[i];
    }
    return out;
}

} // namespace

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stopword file '" + path.string() + "'");
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

LemmaLexicon load_lemma_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lemma lexicon '" + path.string() + "'");
    LemmaLexicon out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected `inflected<TAB>lemma`");
        }
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

double non_latin_share(std::string_view text) {
    std::size_t total = 0;
    std::size_t foreign = 0;
    for (std::size_t i = 0; i < text.size();) {
        const auto cp = next_code_point(text, i);
        if (is_space(cp)) continue;
        ++total;
        if (!is_latin(cp)) ++foreign;
    }
    return total == 0 ? 0.0 : static_cast<double>(foreign) / static_cast<double>(total);
}

bool contains_url(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto rest = text.substr(i);
        if (ascii_equal_ci(rest.substr(0, std::min<std::size_t>(7, rest.size())), "http://") ||
            ascii_equal_ci(rest.substr(0, std::min<std::size_t>(8, rest.size())), "https://")) {
            return true;
        }
        const bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
        if (boundary && ascii_equal_ci(rest.substr(0, std::min<std::size_t>(4, rest.size())), "www.")) {
            return true;
        }
    }
    return false;
}

std::optional<std::vector<std::string>> clean_tweet(std::string_view text,
                                                    const std::optional<std::string>& lang_hint,
                                                    const StopwordSet& stopwords) {
    if (lang_hint && *lang_hint != "en") return std::nullopt;
    if (contains_url(text)) return std::nullopt;
    if (!lang_hint && non_latin_share(text) > kMaxNonLatinShare) return std::nullopt;

    const auto stripped = strip_hashtags(strip_html_tags(text));

    // Keep Latin letters (lowercased, accents folded); everything else separates tokens.
    std::string folded;
    folded.reserve(stripped.size());
    for (std::size_t i = 0; i < stripped.size();) {
        const auto cp = next_code_point(stripped, i);
        if (cp < 0x80 && std::isalpha(static_cast<int>(cp))) {
            folded += static_cast<char>(std::tolower(static_cast<int>(cp)));
        } else if (cp >= 0xC0 && cp <= 0xFF && kLatin1Fold[cp - 0xC0] != '\0') {
            folded += kLatin1Fold[cp - 0xC0];
        } else {
            folded += ' ';
        }
    }

    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < folded.size()) {
        const auto start = folded.find_first_not_of(' ', pos);
        if (start == std::string::npos) break;
        auto end = folded.find(' ', start);
        if (end == std::string::npos) end = folded.size();
        std::string token = folded.substr(start, end - start);
        if (!stopwords.contains(token)) tokens.push_back(std::move(token));
        pos = end;
    }
    return tokens;
}

std::optional<std::vector<std::string>> clean_tweet(const RawTweet& raw, const StopwordSet& stopwords) {
    return clean_tweet(raw.text, raw.lang_hint, stopwords);
}

std::string lemmatize(const std::string& token, const LemmaLexicon& lexicon) {
    const auto it = lexicon.find(token);
    return it == lexicon.end() ? token : it->second;
}

TextResources::Paths TextResources::bundled_paths() {
    std::filesystem::path dir = DCM_DATA_DIR;
    if (const char* env = std::getenv("DCM_DATA_DIR"); env && *env) dir = env;
    return {dir / "stopwords.txt", dir / "lemmas.tsv", dir / "lancaster_rules.txt"};
}

TextResources TextResources::load(const Paths& paths) {
    return TextResources{load_stopwords(paths.stopwords), load_lemma_lexicon(paths.lemmas),
                         LancasterStemmer::from_file(paths.stem_rules)};
}

std::string TextResources::normalize(const std::string& token) const {
    return stemmer.stem(lemmatize(token, lemmas));
}

std::optional<std::vector<std::string>> TextResources::tokens_of(const RawTweet& raw) const {
    auto tokens = clean_tweet(raw, stopwords);
    if (!tokens) return std::nullopt;
    for (auto& t : *tokens) t = normalize(t);
    return tokens;
}

std::vector<FeatureId> extract_features(const std::vector<std::string>& tokens, WordForm form) {
    std::vector<FeatureId> out;
    const auto len = tokens.size();
    const auto n = static_cast<std::size_t>(form.n);
    if (len < n) return out;

    switch (form.kind) {
    case FormKind::Keyword:
        for (const auto& t : tokens) out.push_back({form, {t}});
        break;
    case FormKind::NGram:
        for (std::size_t i = 0; i + n <= len; ++i) {
            out.push_back({form, std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))});
        }
        break;
    case FormKind::SkipGram:
    case FormKind::BagOfWords: {
        const bool bag = form.kind == FormKind::BagOfWords;
        // Walk every increasing index tuple of length n.
        std::vector<std::size_t> idx(n);
        for (std::size_t k = 0; k < n; ++k) idx[k] = k;
        while (true) {
            FeatureId f{form, {}};
            f.tokens.reserve(n);
            for (auto i : idx) f.tokens.push_back(tokens[i]);
            if (bag) {
                std::sort(f.tokens.begin(), f.tokens.end());
                if (std::adjacent_find(f.tokens.begin(), f.tokens.end()) == f.tokens.end()) {
                    out.push_back(std::move(f));
                }
            } else {
                out.push_back(std::move(f));
            }
            std::size_t k = n;
            while (k > 0 && idx[k - 1] == len - n + (k - 1)) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < n; ++j) idx[j] = idx[j - 1] + 1;
        }
        break;
    }
    }
    return out;
}

} // namespace dcm
