#include "dcm/lancaster.hpp"

#include "dcm/error.hpp"

#include <fstream>
#include <sstream>

namespace dcm {

namespace {

bool is_lower_alpha(char c) { return c >= 'a' && c <= 'z'; }

bool is_vowel(char c) {
    switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
        return true;
    default:
        return false;
    }
}

// A stem must keep two letters when it starts with a vowel, or three letters
// with a vowel in second or third position when it starts with a consonant.
bool acceptable(const std::string& word, int remove) {
    const auto remaining = static_cast<int>(word.size()) - remove;
    if (word.empty()) return false;
    if (is_vowel(word[0])) return remaining >= 2;
    return remaining >= 3 && (is_vowel(word[1]) || is_vowel(word[2]));
}

bool ends_with(const std::string& word, const std::string& suffix) {
    return word.size() >= suffix.size() && word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

LancasterStemmer::LancasterStemmer(std::vector<Rule> rules) {
    for (auto& r : rules) {
        if (r.ending.empty()) throw Error("lancaster rule with empty ending");
        by_last_letter_[static_cast<std::size_t>(r.ending.back() - 'a')].push_back(std::move(r));
        ++rule_count_;
    }
}

LancasterStemmer::Rule LancasterStemmer::parse_rule(std::string_view text) {
    const auto bad = [&] { return Error("invalid lancaster rule '" + std::string(text) + "'"); };
    std::size_t i = 0;
    Rule rule;
    while (i < text.size() && is_lower_alpha(text[i])) ++i;
    if (i == 0) throw bad();
    rule.ending.assign(text.rbegin() + static_cast<std::ptrdiff_t>(text.size() - i), text.rend());
    if (i < text.size() && text[i] == '*') {
        rule.intact_only = true;
        ++i;
    }
    if (i >= text.size() || text[i] < '0' || text[i] > '9') throw bad();
    rule.remove = text[i++] - '0';
    while (i < text.size() && is_lower_alpha(text[i])) rule.append += text[i++];
    // Every rule ends in `.` (stop) or `>` (continue).
    if (i + 1 != text.size() || (text[i] != '.' && text[i] != '>')) throw bad();
    rule.stop = text[i] == '.';
    return rule;
}

LancasterStemmer LancasterStemmer::from_text(std::string_view text) {
    std::vector<Rule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto row = std::string_view(line);
        if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
        row = trim(row);
        if (row.empty()) continue;
        rules.push_back(parse_rule(row));
    }
    return LancasterStemmer(std::move(rules));
}

LancasterStemmer LancasterStemmer::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lancaster rule table '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

std::string LancasterStemmer::stem(std::string_view input) const {
    std::string word(input);
    const std::string intact = word;
    while (!word.empty() && is_lower_alpha(word.back())) {
        const auto& group = by_last_letter_[static_cast<std::size_t>(word.back() - 'a')];
        const Rule* fired = nullptr;
        for (const auto& rule : group) {
            if (!ends_with(word, rule.ending)) continue;
            if (rule.intact_only && word != intact) continue;
            if (!acceptable(word, rule.remove)) continue;
            fired = &rule;
            break;
        }
        if (!fired) break;
        const auto before = word.size();
        word.resize(word.size() - static_cast<std::size_t>(fired->remove));
        word += fired->append;
        if (fired->stop || (fired->remove == 0 && word.size() == before)) break;
    }
    return word;
}

} // namespace dcm
