// dcm: command-line driver for the decompose-cluster-map pipeline.
//
// Every stage subcommand reads its inputs from, and writes its checkpoint
// into, the output directory, so `ingest`, `extract`, `correlate`,
// `factorize`, `cluster`, `merge`, `report` chained over one directory give
// the same files as a single `run`.

#include "dcm/checkpoint.hpp"
#include "dcm/error.hpp"
#include "dcm/pipeline.hpp"
#include "dcm/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Collects flags that map 1:1 onto PipelineConfig keys. Values given on the
// command line override those from --config.
class ConfigFlags {
public:
    explicit ConfigFlags(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_file_, "TOML-style key = value file")->check(CLI::ExistingFile);
        app_->add_option("-o,--output-dir", output_dir_, "run directory (default $DCM_OUTPUT_DIR or dcm_out)");
    }

    ConfigFlags& option(const std::string& flag, const std::string& key, const std::string& help) {
        auto& slot = values_.emplace_back(key, std::make_unique<std::string>());
        options_.push_back(app_->add_option(flag, *slot.second, help));
        return *this;
    }

    ConfigFlags& toggle(const std::string& flag, const std::string& key, const std::string& help) {
        values_.emplace_back(key, std::make_unique<std::string>("true"));
        options_.push_back(app_->add_flag(flag, help));
        return *this;
    }

    ConfigFlags& timeframe() {
        return option("--start", "start", "first day, YYYY-MM-DD").option("--end", "end", "last day, YYYY-MM-DD (inclusive)");
    }
    ConfigFlags& text() {
        return option("--form", "form", "keyword|ngram|skipgram|bow")
            .option("--n", "n", "tokens per feature (1 for keyword, 2 or 3 otherwise)")
            .option("--min-count", "min_count", "keep features whose max daily count reaches this")
            .option("--stopwords", "stopwords", "stopword list")
            .option("--lemmas", "lemmas", "lemma lexicon (inflected<TAB>lemma)")
            .option("--stem-rules", "stem_rules", "Lancaster rule table");
    }
    ConfigFlags& metric() {
        return option("--metric", "metric", "pearson|spearman|kendall|dcor|mi")
            .option("--mi-bins", "mi_bins", "equal-width bins for mutual information");
    }
    ConfigFlags& selection() {
        return option("--selection-metric", "selection_metric", "metric used to rank features (default --metric)")
            .option("--top-k", "top_k", "features kept after ranking")
            .toggle("--rank-absolute", "rank_absolute", "rank by |score|");
    }
    ConfigFlags& kmeans() {
        return option("-k,--clusters", "k", "number of clusters")
            .option("--runs", "runs", "k-means restarts")
            .option("--max-iter", "max_iter", "Lloyd iterations per restart")
            .option("--seed", "seed", "root random seed")
            .option("--rank", "rank", "latent dimensions used for clustering (0 = all)")
            .toggle("--weight-by-sigma", "weight_by_sigma", "scale latent coordinates by singular values")
            .option("--init", "init", "random-partition|kmeans++");
    }

    dcm::PipelineConfig resolve() const {
        dcm::PipelineConfig cfg;
        cfg.output_dir = dcm::default_output_dir();
        if (!config_file_.empty()) cfg.load_file(config_file_);
        for (std::size_t i = 0; i < options_.size(); ++i) {
            if (options_[i]->count() > 0) cfg.set(values_[i].first, *values_[i].second);
        }
        if (!output_dir_.empty()) cfg.output_dir = output_dir_;
        return cfg;
    }

private:
    CLI::App* app_;
    std::string config_file_;
    std::string output_dir_;
    std::vector<std::pair<std::string, std::unique_ptr<std::string>>> values_;
    std::vector<CLI::Option*> options_;
};

fs::path in_dir(const dcm::PipelineConfig& cfg, const std::string& override_path, const char* name) {
    return override_path.empty() ? cfg.output_dir / name : fs::path(override_path);
}

void require(bool ok, const char* what) {
    if (!ok) throw dcm::Error(std::string("missing ") + what);
}

// `form:n:metric=path`, e.g. `bow:2:pearson=run/before_after.csv`.
dcm::BeforeAfterSummary table_cell(const std::string& spec) {
    const auto eq = spec.find('=');
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
    if (eq == std::string::npos || c2 == std::string::npos || c2 > eq) {
        throw dcm::Error("--table expects form:n:metric=path, got '" + spec + "'");
    }
    const auto form = dcm::WordForm::make(dcm::parse_form_kind(spec.substr(0, c1)), std::stoi(spec.substr(c1 + 1, c2 - c1 - 1)));
    const auto metric = dcm::parse_metric(spec.substr(c2 + 1, eq - c2 - 1));
    return dcm::summarize(form, metric, dcm::read_before_after(spec.substr(eq + 1)));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decompose-cluster-map: correlate tweet features with an event series, "
                 "then boost them by clustering latent representations"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "filter the raw corpus by timeframe and location");
    ConfigFlags ingest_flags(ingest);
    ingest_flags.option("--corpus", "corpus", "tweet corpus (JSON lines)").option("--geo", "geo", "comma-separated location substrings").timeframe();

    // extract
    auto* extract = app.add_subcommand("extract", "clean, normalize and count features per day");
    ConfigFlags extract_flags(extract);
    extract_flags.timeframe().text();
    std::string extract_in;
    extract->add_option("--ingested", extract_in, "ingested tweets (default <dir>/ingested.jsonl)");

    // correlate
    auto* correlate = app.add_subcommand("correlate", "score features against the GSR and keep the top K");
    ConfigFlags correlate_flags(correlate);
    correlate_flags.option("--gsr", "gsr", "GSR csv (date,count)").timeframe().metric().selection();
    std::string correlate_in;
    correlate->add_option("--counts", correlate_in, "count matrix (default <dir>/counts.tsv)");

    // factorize
    auto* factorize = app.add_subcommand("factorize", "thin SVD of the selected count matrix");
    ConfigFlags factorize_flags(factorize);
    factorize_flags.toggle("--center-rows", "center_rows", "subtract each row's mean before the SVD");
    std::string factorize_in;
    factorize->add_option("--counts", factorize_in, "selected count matrix (default <dir>/selected.tsv)");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "k-means over latent feature vectors, medoid lookup");
    ConfigFlags cluster_flags(cluster);
    cluster_flags.kmeans();
    std::string cluster_in;
    cluster->add_option("--factors", cluster_in, "factor dump (default <dir>/factors.txt)");

    // merge
    auto* merge = app.add_subcommand("merge", "sum member rows into medoids and re-correlate");
    ConfigFlags merge_flags(merge);
    merge_flags.option("--gsr", "gsr", "GSR csv (date,count)").timeframe().metric();
    std::string merge_counts, merge_lookup;
    merge->add_option("--counts", merge_counts, "selected count matrix (default <dir>/selected.tsv)");
    merge->add_option("--lookup", merge_lookup, "cluster lookup (default <dir>/lookup.tsv)");

    // report
    auto* report = app.add_subcommand("report", "render max / mean-of-top-N tables from before/after files");
    std::vector<std::string> tables;
    std::string report_format = "text";
    std::string report_out;
    std::size_t report_top = dcm::kReportTopN;
    report->add_option("--table", tables, "form:n:metric=before_after.csv (repeatable)")->required();
    report->add_option("--format", report_format, "csv|text")->capture_default_str();
    report->add_option("--top", report_top, "N for the mean-of-top-N table")->capture_default_str();
    report->add_option("-o,--output", report_out, "output file (default stdout)");

    // run
    auto* run = app.add_subcommand("run", "full pipeline in one go");
    ConfigFlags run_flags(run);
    run_flags.option("--corpus", "corpus", "tweet corpus (JSON lines)")
        .option("--gsr", "gsr", "GSR csv (date,count)")
        .option("--geo", "geo", "comma-separated location substrings")
        .timeframe()
        .text()
        .metric()
        .selection()
        .toggle("--center-rows", "center_rows", "subtract each row's mean before the SVD")
        .kmeans();

    // synth
    auto* synth = app.add_subcommand("synth", "write a seeded synthetic corpus with planted synonym clusters");
    dcm::SyntheticSpec spec;
    std::string synth_out;
    synth->add_option("-o,--output-dir", synth_out, "directory for corpus.jsonl, gsr.csv, planted.tsv")->required();
    synth->add_option("--days", spec.days)->capture_default_str();
    synth->add_option("--start", spec.start_date)->capture_default_str();
    synth->add_option("--background-features", spec.background_features)->capture_default_str();
    synth->add_option("--background-rate", spec.background_rate)->capture_default_str();
    synth->add_option("--clusters", spec.planted_clusters)->capture_default_str();
    synth->add_option("--synonyms", spec.synonyms)->capture_default_str();
    synth->add_option("--event-days", spec.event_days)->capture_default_str();
    synth->add_option("--magnitude", spec.spike_magnitude)->capture_default_str();
    synth->add_option("--events-per-day", spec.events_per_day)->capture_default_str();
    synth->add_option("--decoys-per-day", spec.decoys_per_day)->capture_default_str();
    synth->add_option("--location", spec.location)->capture_default_str();
    synth->add_option("--seed", spec.seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    const char* stage = app.get_subcommands().front()->get_name().c_str();
    try {
        if (ingest->parsed()) {
            const auto cfg = ingest_flags.resolve();
            require(!cfg.corpus.empty(), "--corpus");
            const auto loaded = dcm::ingest_stage(cfg);
            fs::create_directories(cfg.output_dir);
            dcm::write_ingested(loaded.tweets, cfg.output_dir / dcm::files::kIngested);
            const auto& s = loaded.summary;
            std::fprintf(stderr, "ingest: %zu read, %zu kept, %zu unparseable, %zu outside timeframe, %zu other location\n",
                         s.read, s.yielded, s.skipped_parse, s.skipped_time, s.skipped_geo);
        } else if (extract->parsed()) {
            const auto cfg = extract_flags.resolve();
            const auto tweets = dcm::read_ingested(in_dir(cfg, extract_in, dcm::files::kIngested));
            const auto text = dcm::TextResources::load(cfg.text);
            const auto out = dcm::extract_stage(tweets, cfg.timeframe().days(), text, cfg.form, cfg.min_count);
            fs::create_directories(cfg.output_dir);
            dcm::write_count_matrix(out.counts, cfg.output_dir / dcm::files::kCounts);
            std::fprintf(stderr, "extract: %zu tweets rejected, %zu features, %zu after min_count\n", out.rejected,
                         out.features_before_filter, out.counts.size());
        } else if (correlate->parsed()) {
            const auto cfg = correlate_flags.resolve();
            require(!cfg.gsr.empty(), "--gsr");
            const auto counts = dcm::read_count_matrix(in_dir(cfg, correlate_in, dcm::files::kCounts));
            const auto top = dcm::select_stage(counts, dcm::gsr_stage(cfg), cfg);
            fs::create_directories(cfg.output_dir);
            dcm::write_scores(top.ranked, cfg.output_dir / dcm::files::kScores);
            dcm::write_count_matrix(top.matrix, cfg.output_dir / dcm::files::kSelected);
            std::fprintf(stderr, "correlate: kept %zu of %zu features\n", top.matrix.size(), counts.size());
        } else if (factorize->parsed()) {
            const auto cfg = factorize_flags.resolve();
            const auto counts = dcm::read_count_matrix(in_dir(cfg, factorize_in, dcm::files::kSelected));
            const auto f = dcm::factorize_stage(counts, cfg.center_rows);
            fs::create_directories(cfg.output_dir);
            dcm::write_factors(f, cfg.output_dir / dcm::files::kFactors);
            std::fprintf(stderr, "factorize: %zu x %zu, numerical rank %zu\n", f.u.rows(), f.vt.cols(), f.numerical_rank);
        } else if (cluster->parsed()) {
            const auto cfg = cluster_flags.resolve();
            const auto f = dcm::read_factors(in_dir(cfg, cluster_in, dcm::files::kFactors));
            const auto c = dcm::cluster_stage(f, cfg.kmeans);
            fs::create_directories(cfg.output_dir);
            dcm::write_lookup(c.lookup, cfg.output_dir / dcm::files::kLookup);
            std::fprintf(stderr, "cluster: %zu clusters, objective %s (run %zu)\n", c.lookup.members_of.size(),
                         dcm::format_double(c.clustering.objective).c_str(), c.clustering.best_run);
        } else if (merge->parsed()) {
            const auto cfg = merge_flags.resolve();
            require(!cfg.gsr.empty(), "--gsr");
            const auto counts = dcm::read_count_matrix(in_dir(cfg, merge_counts, dcm::files::kSelected));
            const auto lookup = dcm::read_lookup(in_dir(cfg, merge_lookup, dcm::files::kLookup));
            const auto m = dcm::merge_stage(counts, lookup, dcm::gsr_stage(cfg), cfg.metric);
            fs::create_directories(cfg.output_dir);
            dcm::write_count_matrix(m.counts.merged, cfg.output_dir / dcm::files::kMerged);
            dcm::write_before_after(m.table, cfg.output_dir / dcm::files::kBeforeAfter);
            std::fprintf(stderr, "merge: %zu medoids\n", m.table.size());
        } else if (report->parsed()) {
            stage = "report";
            std::vector<dcm::BeforeAfterSummary> cells;
            for (const auto& t : tables) cells.push_back(table_cell(t));
            const auto format = dcm::parse_report_format(report_format);
            if (report_out.empty()) {
                std::cout << dcm::render_report(cells, format, report_top);
            } else {
                dcm::emit_report(cells, format, report_out, report_top);
            }
        } else if (run->parsed()) {
            const auto cfg = run_flags.resolve();
            const auto r = dcm::run_pipeline(cfg);
            std::fprintf(stderr, "run: %zu tweets kept, %zu features, %zu selected, %zu clusters -> %s\n",
                         r.ingest.yielded, r.features_kept, r.features_selected, r.clusters,
                         cfg.output_dir.string().c_str());
            std::cout << dcm::render_report({r.summary}, dcm::ReportFormat::Text);
        } else if (synth->parsed()) {
            spec.validate();
            const auto corpus = dcm::generate_synthetic(spec, synth_out);
            std::fprintf(stderr, "synth: %d days, %zu event days, %zu planted clusters -> %s\n", spec.days,
                         corpus.event_days.size(), corpus.planted.size(), synth_out.c_str());
        }
    } catch (const dcm::StageError& e) {
        std::fprintf(stderr, "dcm: error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "dcm: error: [%s] %s\n", stage, e.what());
        return 1;
    }
    return 0;
}
