#include "dcm/checkpoint.hpp"

#include "dcm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dcm {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return in;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s = s.substr(pos + 1);
    }
    return out;
}

template <class T>
T parse_number(std::string_view text, const std::string& where) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(where + ": invalid number '" + std::string(text) + "'");
    }
    return v;
}

double parse_double(std::string_view text, const std::string& where) {
    // from_chars for double is not available in every libstdc++ we target.
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error(where + ": invalid number '" + s + "'");
    return v;
}

std::optional<double> parse_score(std::string_view text, const std::string& where) {
    if (text == "NA") return std::nullopt;
    return parse_double(text, where);
}

std::string score_text(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_count_matrix(const CountMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& [id, row] : m.rows()) {
        out << id.str() << '\t';
        const auto dense = row.dense(m.days());
        for (std::size_t d = 0; d < dense.size(); ++d) {
            if (d) out << ',';
            out << dense[d];
        }
        out << '\n';
    }
}

CountMatrix read_count_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::optional<CountMatrix> m;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error(where + ": expected `feature-id<TAB>counts`");
        const auto fields = split(std::string_view(line).substr(tab + 1), ',');
        DailyCounts counts;
        counts.reserve(fields.size());
        for (auto f : fields) counts.push_back(parse_number<std::int64_t>(f, where));
        if (!m) m.emplace(static_cast<int>(counts.size()));
        m->set_row(FeatureId::parse(std::string_view(line).substr(0, tab)), counts);
    }
    if (!m) throw Error("count matrix checkpoint '" + path.string() + "' is empty");
    return *m;
}

void write_scores(const std::vector<ScoredFeature>& scores, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "feature,score\n";
    for (const auto& s : scores) out << s.id.str() << ',' << score_text(s.score) << '\n';
}

void write_factors(const FactoredMatrix& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    const auto m = f.u.rows(), n = f.vt.cols(), r = f.rank();
    out << "dcm-factors 1\n";
    out << "shape " << m << ' ' << n << ' ' << r << ' ' << f.numerical_rank << '\n';
    out << "features\n";
    for (std::size_t i = 0; i < m; ++i) out << (i < f.feature_order.size() ? f.feature_order[i].str() : "-") << '\n';
    const auto write_row = [&](std::span<const double> row) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_double(row[j]);
        out << '\n';
    };
    out << "sigma\n";
    write_row(f.sigma);
    out << "u\n";
    for (std::size_t i = 0; i < m; ++i) write_row(f.u.row(i));
    out << "vt\n";
    for (std::size_t i = 0; i < r; ++i) write_row(f.vt.row(i));
}

FactoredMatrix read_factors(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    const auto next = [&](const char* what) -> std::string& {
        if (!std::getline(in, line)) throw Error(path.string() + ": truncated factor file, expected " + what);
        ++line_no;
        strip_cr(line);
        return line;
    };
    const auto expect = [&](const char* tag) {
        if (next(tag) != tag) throw Error(path.string() + ":" + std::to_string(line_no) + ": expected '" + tag + "'");
    };
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no); };
    const auto read_row = [&](std::span<double> dst, const char* what) {
        const auto fields = split(next(what), ' ');
        if (fields.size() != dst.size()) throw Error(where() + ": expected " + std::to_string(dst.size()) + " values");
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = parse_double(fields[j], where());
    };

    expect("dcm-factors 1");
    const auto shape = split(next("shape"), ' ');
    if (shape.size() != 5 || shape[0] != "shape") throw Error(where() + ": expected `shape m n r rank`");
    const auto m = parse_number<std::size_t>(shape[1], where());
    const auto n = parse_number<std::size_t>(shape[2], where());
    const auto r = parse_number<std::size_t>(shape[3], where());

    FactoredMatrix f;
    f.numerical_rank = parse_number<std::size_t>(shape[4], where());
    expect("features");
    for (std::size_t i = 0; i < m; ++i) {
        const auto& id = next("feature id");
        if (id != "-") f.feature_order.push_back(FeatureId::parse(id));
    }
    if (!f.feature_order.empty() && f.feature_order.size() != m) throw Error(where() + ": partial feature list");
    expect("sigma");
    f.sigma.resize(r);
    read_row(f.sigma, "sigma");
    expect("u");
    f.u = Matrix(m, r);
    for (std::size_t i = 0; i < m; ++i) read_row(f.u.row(i), "u row");
    expect("vt");
    f.vt = Matrix(r, n);
    for (std::size_t i = 0; i < r; ++i) read_row(f.vt.row(i), "vt row");
    return f;
}

void write_lookup(const ClusterLookup& lookup, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& [member, medoid] : lookup.medoid_of) out << member.str() << '\t' << medoid.str() << '\n';
}

ClusterLookup read_lookup(const std::filesystem::path& path) {
    auto in = open_in(path);
    ClusterLookup lookup;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected `member<TAB>medoid`");
        }
        auto member = FeatureId::parse(std::string_view(line).substr(0, tab));
        auto medoid = FeatureId::parse(std::string_view(line).substr(tab + 1));
        lookup.members_of[medoid].push_back(member);
        lookup.medoid_of.emplace(std::move(member), std::move(medoid));
    }
    for (auto& [medoid, members] : lookup.members_of) {
        std::sort(members.begin(), members.end());
        const auto self = lookup.medoid_of.find(medoid);
        if (self == lookup.medoid_of.end() || !(self->second == medoid)) {
            throw Error(path.string() + ": medoid " + medoid.str() + " does not map to itself");
        }
    }
    return lookup;
}

void write_before_after(const std::vector<BeforeAfterRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "medoid,members,before,after\n";
    for (const auto& r : rows) {
        out << r.medoid.str() << ',' << r.members << ',' << score_text(r.before) << ',' << score_text(r.after) << '\n';
    }
}

std::vector<BeforeAfterRow> read_before_after(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<BeforeAfterRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || (line_no == 1 && line == "medoid,members,before,after")) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        const auto f = split(line, ',');
        if (f.size() != 4) throw Error(where + ": expected `medoid,members,before,after`");
        rows.push_back({FeatureId::parse(f[0]), parse_number<std::size_t>(f[1], where), parse_score(f[2], where),
                        parse_score(f[3], where)});
    }
    return rows;
}

void write_ingested(const std::vector<DatedTweet>& tweets, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& t : tweets) {
        nlohmann::ordered_json j;
        j["day"] = t.day;
        j["ts"] = format_date(t.tweet.day);
        j["text"] = t.tweet.text;
        if (t.tweet.location_tag) j["loc"] = *t.tweet.location_tag;
        if (t.tweet.lang_hint) j["lang"] = *t.tweet.lang_hint;
        out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

std::vector<DatedTweet> read_ingested(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<DatedTweet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        auto tweet = parse_tweet_line(line);
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (!tweet || !j.contains("day") || !j["day"].is_number_integer()) {
            throw Error(where + ": malformed ingest checkpoint record");
        }
        out.push_back({j["day"].get<int>(), std::move(*tweet)});
    }
    return out;
}

} // namespace dcm
