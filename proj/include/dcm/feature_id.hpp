#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dcm {

enum class FormKind { Keyword, NGram, SkipGram, BagOfWords };

// A word form plus the number of tokens per feature. Keyword is always n=1,
// the other forms take n in {2,3}.
struct WordForm {
    FormKind kind = FormKind::Keyword;
    int n = 1;

    static WordForm keyword() { return {FormKind::Keyword, 1}; }
    static WordForm ngram(int n) { return make(FormKind::NGram, n); }
    static WordForm skipgram(int n) { return make(FormKind::SkipGram, n); }
    static WordForm bag_of_words(int n) { return make(FormKind::BagOfWords, n); }

    // Throws dcm::Error when n violates the per-kind constraint.
    static WordForm make(FormKind kind, int n);

    // Row label used by the Tables-style report ("UniGram", "Bi-gram", "BOW-2", ...).
    std::string label() const;

    auto operator<=>(const WordForm&) const = default;
};

std::string_view to_string(FormKind kind);
FormKind parse_form_kind(std::string_view text);

// Canonical identity of a feature. Keyword and BagOfWords token lists are
// sorted and duplicate-free; NGram and SkipGram keep tweet order.
struct FeatureId {
    WordForm form;
    std::vector<std::string> tokens;

    // Rendered as `form:n:tok1+tok2`.
    std::string str() const;
    static FeatureId parse(std::string_view text);

    auto operator<=>(const FeatureId&) const = default;
    bool operator==(const FeatureId&) const = default;
};

struct FeatureIdHash {
    std::size_t operator()(const FeatureId& id) const noexcept;
};

} // namespace dcm
