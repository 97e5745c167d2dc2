#include "dcm/feature_id.hpp"

#include "dcm/error.hpp"

#include <charconv>

namespace dcm {

WordForm WordForm::make(FormKind kind, int n) {
    if (kind == FormKind::Keyword) {
        if (n != 1) {
            throw Error("keyword features take n=1, got n=" + std::to_string(n));
        }
    } else if (n < 2 || n > 3) {
        throw Error(std::string(to_string(kind)) + " features take n in {2,3}, got n=" +
                    std::to_string(n));
    }
    return {kind, n};
}

std::string WordForm::label() const {
    switch (kind) {
    case FormKind::Keyword:
        return "UniGram";
    case FormKind::NGram:
        return n == 2 ? "Bi-gram" : "Tri-gram";
    case FormKind::SkipGram:
        return "Skip-gram-" + std::to_string(n);
    case FormKind::BagOfWords:
        return "BOW-" + std::to_string(n);
    }
    return "?";
}

std::string_view to_string(FormKind kind) {
    switch (kind) {
    case FormKind::Keyword:
        return "keyword";
    case FormKind::NGram:
        return "ngram";
    case FormKind::SkipGram:
        return "skipgram";
    case FormKind::BagOfWords:
        return "bow";
    }
    return "?";
}

FormKind parse_form_kind(std::string_view text) {
    if (text == "keyword") return FormKind::Keyword;
    if (text == "ngram") return FormKind::NGram;
    if (text == "skipgram") return FormKind::SkipGram;
    if (text == "bow") return FormKind::BagOfWords;
    throw Error("unknown word form '" + std::string(text) +
                "' (expected keyword|ngram|skipgram|bow)");
}

std::string FeatureId::str() const {
    std::string out(to_string(form.kind));
    out += ':';
    out += std::to_string(form.n);
    out += ':';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += '+';
        out += tokens[i];
    }
    return out;
}

FeatureId FeatureId::parse(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
        throw Error("malformed feature id '" + std::string(text) + "'");
    }
    const auto kind = parse_form_kind(text.substr(0, c1));
    int n = 0;
    const auto n_text = text.substr(c1 + 1, c2 - c1 - 1);
    auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
    if (ec != std::errc{} || ptr != n_text.data() + n_text.size()) {
        throw Error("malformed feature id '" + std::string(text) + "'");
    }
    FeatureId id{WordForm::make(kind, n), {}};
    auto rest = text.substr(c2 + 1);
    while (true) {
        const auto plus = rest.find('+');
        id.tokens.emplace_back(rest.substr(0, plus));
        if (id.tokens.back().empty()) {
            throw Error("malformed feature id '" + std::string(text) + "'");
        }
        if (plus == std::string_view::npos) break;
        rest = rest.substr(plus + 1);
    }
    if (static_cast<int>(id.tokens.size()) != n) {
        throw Error("feature id '" + std::string(text) + "' has " +
                    std::to_string(id.tokens.size()) + " tokens, expected " + std::to_string(n));
    }
    return id;
}

std::size_t FeatureIdHash::operator()(const FeatureId& id) const noexcept {
    std::size_t h = static_cast<std::size_t>(id.form.kind) * 31 + static_cast<std::size_t>(id.form.n);
    for (const auto& t : id.tokens) {
        h ^= std::hash<std::string>{}(t) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

} // namespace dcm
