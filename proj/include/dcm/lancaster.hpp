#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dcm {

// Paice/Husk (Lancaster) stemmer driven by a rule table in the published
// notation, e.g. `sei3y>`: reversed ending "sei", remove 3 chars, append "y",
// then continue. `*` restricts a rule to words no rule has touched yet and
// `.` stops stemming after the rule fires.
class LancasterStemmer {
public:
    struct Rule {
        std::string ending;  // in normal (not reversed) order
        bool intact_only = false;
        int remove = 0;
        std::string append;
        bool stop = false;
    };

    // Rules are tried in table order within each final-letter group.
    explicit LancasterStemmer(std::vector<Rule> rules);

    static LancasterStemmer from_file(const std::filesystem::path& path);
    // One rule per line; blank lines and `#` comments are ignored.
    static LancasterStemmer from_text(std::string_view text);
    static Rule parse_rule(std::string_view rule);

    std::string stem(std::string_view word) const;

    std::size_t rule_count() const { return rule_count_; }

private:
    std::array<std::vector<Rule>, 26> by_last_letter_;
    std::size_t rule_count_ = 0;
};

} // namespace dcm
