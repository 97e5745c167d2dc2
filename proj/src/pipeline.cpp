#include "dcm/pipeline.hpp"

#include "dcm/checkpoint.hpp"
#include "dcm/correlation.hpp"
#include "dcm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dcm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <class T>
T to_number(std::string_view key, std::string_view value) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error("config key '" + std::string(key) + "': invalid number '" + std::string(value) + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw Error("config key '" + std::string(key) + "': expected true or false, got '" + std::string(value) + "'");
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string_view init_name(KMeansInit init) {
    return init == KMeansInit::PlusPlus ? "kmeans++" : "random-partition";
}

template <class F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

} // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    auto value = trim(raw);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const std::string v(value);

    if (key == "corpus") corpus = v;
    else if (key == "gsr") gsr = v;
    else if (key == "start") start = v;
    else if (key == "end") end = v;
    else if (key == "geo") {
        geo.clear();
        std::stringstream ss(v);
        std::string place;
        while (std::getline(ss, place, ',')) {
            const auto t = trim(place);
            if (!t.empty()) geo.emplace_back(t);
        }
    }
    else if (key == "form") {
        const auto kind = parse_form_kind(v);
        form = WordForm::make(kind, kind == FormKind::Keyword ? 1 : std::max(form.n, 2));
    }
    else if (key == "n") form = WordForm::make(form.kind, to_number<int>(key, v));
    else if (key == "metric") metric.metric = parse_metric(v);
    else if (key == "mi_bins") metric.mi_bins = to_number<int>(key, v);
    else if (key == "selection_metric") selection_metric = v.empty() ? std::nullopt : std::optional(parse_metric(v));
    else if (key == "top_k") top_k = to_number<std::size_t>(key, v);
    else if (key == "min_count") min_count = to_number<std::int64_t>(key, v);
    else if (key == "rank_absolute") rank_absolute = to_bool(key, v);
    else if (key == "center_rows") center_rows = to_bool(key, v);
    else if (key == "k") kmeans.k = to_number<std::size_t>(key, v);
    else if (key == "runs") kmeans.runs = to_number<std::size_t>(key, v);
    else if (key == "max_iter") kmeans.max_iter = to_number<std::size_t>(key, v);
    else if (key == "seed") kmeans.seed = to_number<std::uint64_t>(key, v);
    else if (key == "rank") kmeans.rank = to_number<std::size_t>(key, v);
    else if (key == "weight_by_sigma") kmeans.weight_by_sigma = to_bool(key, v);
    else if (key == "init") {
        if (v == "random-partition") kmeans.init = KMeansInit::RandomPartition;
        else if (v == "kmeans++") kmeans.init = KMeansInit::PlusPlus;
        else throw Error("config key 'init': expected random-partition or kmeans++");
    }
    else if (key == "output_dir") output_dir = v;
    else if (key == "stopwords") text.stopwords = v;
    else if (key == "lemmas") text.lemmas = v;
    else if (key == "stem_rules") text.stem_rules = v;
    else throw Error("unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside quotes.
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            if (line[i] == '#' && !in_quotes) {
                line.resize(i);
                break;
            }
        }
        const auto row = trim(line);
        if (row.empty() || row.front() == '[') continue;
        const auto eq = row.find('=');
        if (eq == std::string_view::npos) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected `key = value`");
        }
        try {
            set(trim(row.substr(0, eq)), row.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    PipelineConfig cfg;
    cfg.load_file(path);
    return cfg;
}

std::string PipelineConfig::manifest() const {
    std::ostringstream out;
    std::string geo_joined;
    for (std::size_t i = 0; i < geo.size(); ++i) geo_joined += (i ? "," : "") + geo[i];
    out << "# decompose-cluster-map run manifest\n";
    out << "corpus = " << quoted(corpus.string()) << '\n';
    out << "gsr = " << quoted(gsr.string()) << '\n';
    out << "start = " << quoted(start) << '\n';
    out << "end = " << quoted(end) << '\n';
    out << "geo = " << quoted(geo_joined) << '\n';
    out << "form = " << quoted(std::string(to_string(form.kind))) << '\n';
    out << "n = " << form.n << '\n';
    out << "metric = " << quoted(std::string(to_string(metric.metric))) << '\n';
    out << "mi_bins = " << metric.mi_bins << '\n';
    out << "selection_metric = " << quoted(std::string(to_string(selection().metric))) << '\n';
    out << "top_k = " << top_k << '\n';
    out << "min_count = " << min_count << '\n';
    out << "rank_absolute = " << (rank_absolute ? "true" : "false") << '\n';
    out << "center_rows = " << (center_rows ? "true" : "false") << '\n';
    out << "k = " << kmeans.k << '\n';
    out << "runs = " << kmeans.runs << '\n';
    out << "max_iter = " << kmeans.max_iter << '\n';
    out << "seed = " << kmeans.seed << '\n';
    out << "rank = " << kmeans.rank << '\n';
    out << "weight_by_sigma = " << (kmeans.weight_by_sigma ? "true" : "false") << '\n';
    out << "init = " << quoted(std::string(init_name(kmeans.init))) << '\n';
    out << "stopwords = " << quoted(text.stopwords.string()) << '\n';
    out << "lemmas = " << quoted(text.lemmas.string()) << '\n';
    out << "stem_rules = " << quoted(text.stem_rules.string()) << '\n';
    out << "output_dir = " << quoted(output_dir.string()) << '\n';
    return out.str();
}

void PipelineConfig::validate() const {
    if (corpus.empty()) throw Error("no corpus path given");
    if (gsr.empty()) throw Error("no GSR path given");
    if (start.empty() || end.empty()) throw Error("timeframe needs both start and end dates");
    (void)timeframe();
    for (const auto& [what, p] : {std::pair{"corpus", corpus}, std::pair{"GSR", gsr},
                                  std::pair{"stopword list", text.stopwords}, std::pair{"lemma lexicon", text.lemmas},
                                  std::pair{"stemming rules", text.stem_rules}}) {
        if (!std::filesystem::exists(p)) throw Error(std::string(what) + " file '" + p.string() + "' does not exist");
    }
    (void)WordForm::make(form.kind, form.n);
    if (top_k < 1) throw Error("top_k must be >= 1");
    if (min_count < 0) throw Error("min_count must be >= 0");
    if (metric.mi_bins < 2) throw Error("mi_bins must be >= 2");
    if (kmeans.k < 1 || kmeans.runs < 1 || kmeans.max_iter < 1) throw Error("k, runs and max_iter must be >= 1");
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("DCM_OUTPUT_DIR"); env && *env) return env;
    return "dcm_out";
}

LoadedTweets ingest_stage(const PipelineConfig& cfg) {
    return in_stage("ingest", [&] { return load_tweets(cfg.corpus, cfg.timeframe(), cfg.geo); });
}

GsrVector gsr_stage(const PipelineConfig& cfg) {
    return in_stage("gsr", [&] { return load_gsr(cfg.gsr, cfg.timeframe()).gsr; });
}

Extracted extract_stage(const std::vector<DatedTweet>& tweets, int days, const TextResources& text, WordForm form,
                        std::int64_t min_count) {
    Extracted out;
    const auto all = in_stage("accumulate", [&] {
        CountAccumulator acc(days);
        for (const auto& t : tweets) {
            const auto tokens = text.tokens_of(t.tweet);
            if (!tokens) {
                ++out.rejected;
                continue;
            }
            acc.add(t.day, extract_features(*tokens, form));
        }
        auto m = acc.finish();
        if (m.empty()) throw Error("no features extracted from the corpus");
        return m;
    });
    out.features_before_filter = all.size();
    out.counts = in_stage("filter", [&] {
        auto kept = filter_min_count(all, min_count);
        if (kept.empty()) {
            throw Error("no features reach min_count=" + std::to_string(min_count) + " on any day (" +
                        std::to_string(all.size()) + " extracted)");
        }
        return kept;
    });
    return out;
}

TopK select_stage(const CountMatrix& counts, const GsrVector& gsr, const PipelineConfig& cfg) {
    return in_stage("correlate", [&] { return select_top_k(counts, gsr, cfg.selection(), cfg.top_k, cfg.rank_absolute); });
}

FactoredMatrix factorize_stage(const CountMatrix& selected, bool center_rows) {
    return in_stage("factorize", [&] { return factorize(selected, center_rows); });
}

Clustered cluster_stage(const FactoredMatrix& factors, const KMeansConfig& cfg) {
    return in_stage("cluster", [&] {
        const auto points = clustering_points(factors, cfg.rank, cfg.weight_by_sigma);
        auto clustering = kmeans(points, cfg);
        auto lookup = build_lookup(clustering, factors.feature_order, points);
        return Clustered{std::move(clustering), std::move(lookup)};
    });
}

Merged merge_stage(const CountMatrix& selected, const ClusterLookup& lookup, const GsrVector& gsr,
                   const MetricSpec& metric) {
    return in_stage("merge", [&] {
        auto counts = merge_cluster_vectors(selected, lookup);
        auto table = recorrelate(counts, lookup, gsr, metric);
        return Merged{std::move(counts), std::move(table)};
    });
}

RunReport run_pipeline(const PipelineConfig& cfg) {
    in_stage("config", [&] { cfg.validate(); });
    const auto& dir = cfg.output_dir;
    in_stage("config", [&] { std::filesystem::create_directories(dir); });
    const auto days = cfg.timeframe().days();

    RunReport report;
    const auto text = in_stage("config", [&] { return TextResources::load(cfg.text); });
    const auto gsr = gsr_stage(cfg);
    const auto tweets = ingest_stage(cfg);
    report.ingest = tweets.summary;

    const auto extracted = extract_stage(tweets.tweets, days, text, cfg.form, cfg.min_count);
    report.rejected_tweets = extracted.rejected;
    report.features_extracted = extracted.features_before_filter;
    report.features_kept = extracted.counts.size();
    write_count_matrix(extracted.counts, dir / files::kCounts);

    const auto top = select_stage(extracted.counts, gsr, cfg);
    report.features_selected = top.matrix.size();
    write_scores(top.ranked, dir / files::kScores);
    write_count_matrix(top.matrix, dir / files::kSelected);

    const auto factors = factorize_stage(top.matrix, cfg.center_rows);
    report.numerical_rank = factors.numerical_rank;
    write_factors(factors, dir / files::kFactors);

    const auto clustered = cluster_stage(factors, cfg.kmeans);
    report.clusters = clustered.lookup.members_of.size();
    report.objective = clustered.clustering.objective;
    report.best_run = clustered.clustering.best_run;
    write_lookup(clustered.lookup, dir / files::kLookup);

    auto merged = merge_stage(top.matrix, clustered.lookup, gsr, cfg.metric);
    write_count_matrix(merged.counts.merged, dir / files::kMerged);
    write_before_after(merged.table, dir / files::kBeforeAfter);

    report.summary = in_stage("report", [&] { return summarize(cfg.form, cfg.metric.metric, merged.table); });
    in_stage("report", [&] {
        emit_report({report.summary}, ReportFormat::Csv, dir / files::kReportCsv);
        emit_report({report.summary}, ReportFormat::Text, dir / files::kReportText);
    });
    report.table = std::move(merged.table);

    {
        std::ofstream manifest(dir / files::kManifest, std::ios::binary);
        manifest << cfg.manifest();
        nlohmann::ordered_json j;
        j["tweets_read"] = report.ingest.read;
        j["tweets_yielded"] = report.ingest.yielded;
        j["skipped_parse"] = report.ingest.skipped_parse;
        j["skipped_geo"] = report.ingest.skipped_geo;
        j["skipped_time"] = report.ingest.skipped_time;
        j["tweets_rejected"] = report.rejected_tweets;
        j["features_extracted"] = report.features_extracted;
        j["features_kept"] = report.features_kept;
        j["features_selected"] = report.features_selected;
        j["numerical_rank"] = report.numerical_rank;
        j["clusters"] = report.clusters;
        j["objective"] = format_double(report.objective);
        j["best_run"] = report.best_run;
        std::ofstream summary(dir / files::kRunSummary, std::ios::binary);
        summary << j.dump(2) << '\n';
    }
    return report;
}

} // namespace dcm
