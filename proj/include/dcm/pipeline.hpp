#pragma once

#include "dcm/clustering.hpp"
#include "dcm/corpus_ingest.hpp"
#include "dcm/count_matrix.hpp"
#include "dcm/error.hpp"
#include "dcm/factorization.hpp"
#include "dcm/metric.hpp"
#include "dcm/report.hpp"
#include "dcm/text_pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcm {

// Fatal error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline constexpr std::size_t kDefaultTopK = 10000;

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path gsr;
    std::string start;  // YYYY-MM-DD, inclusive
    std::string end;    // YYYY-MM-DD, inclusive
    GeoFilter geo;
    WordForm form = WordForm::bag_of_words(2);
    MetricSpec metric;
    std::optional<Metric> selection_metric;  // top-K ranking metric; defaults to `metric`
    std::size_t top_k = kDefaultTopK;
    std::int64_t min_count = kDefaultMinCount;
    bool rank_absolute = false;
    bool center_rows = false;
    KMeansConfig kmeans;
    std::filesystem::path output_dir;
    TextResources::Paths text = TextResources::bundled_paths();

    // Applies one `key = value` setting; throws dcm::Error on unknown keys or
    // bad values. Keys match the manifest written by manifest().
    void set(std::string_view key, std::string_view value);

    // Reads a TOML-style file of `key = value` lines (`#` comments, optional
    // double quotes around values).
    static PipelineConfig from_file(const std::filesystem::path& path);
    void load_file(const std::filesystem::path& path);

    // Every parameter including the seed, in a fixed order, loadable by from_file.
    std::string manifest() const;

    Timeframe timeframe() const { return Timeframe::parse(start, end); }
    MetricSpec selection() const { return {selection_metric.value_or(metric.metric), metric.mi_bins}; }

    // Checks value constraints and that input files exist.
    void validate() const;
};

// Stage building blocks. Each throws StageError labeled with its stage name.
LoadedTweets ingest_stage(const PipelineConfig& cfg);

struct Extracted {
    CountMatrix counts;        // after the min-count filter
    std::size_t rejected = 0;  // tweets dropped by cleaning
    std::size_t features_before_filter = 0;
};
Extracted extract_stage(const std::vector<DatedTweet>& tweets, int days, const TextResources& text, WordForm form,
                        std::int64_t min_count);

TopK select_stage(const CountMatrix& counts, const GsrVector& gsr, const PipelineConfig& cfg);
FactoredMatrix factorize_stage(const CountMatrix& selected, bool center_rows);

struct Clustered {
    Clustering clustering;
    ClusterLookup lookup;
};
Clustered cluster_stage(const FactoredMatrix& factors, const KMeansConfig& cfg);

struct Merged {
    MergedCounts counts;
    std::vector<BeforeAfterRow> table;
};
Merged merge_stage(const CountMatrix& selected, const ClusterLookup& lookup, const GsrVector& gsr,
                   const MetricSpec& metric);

GsrVector gsr_stage(const PipelineConfig& cfg);

struct RunReport {
    IngestSummary ingest;
    std::size_t rejected_tweets = 0;
    std::size_t features_extracted = 0;
    std::size_t features_kept = 0;
    std::size_t features_selected = 0;
    std::size_t numerical_rank = 0;
    std::size_t clusters = 0;
    double objective = 0.0;
    std::size_t best_run = 0;
    std::vector<BeforeAfterRow> table;
    BeforeAfterSummary summary;
};

// ingest -> clean/extract -> accumulate -> filter -> top-K -> SVD -> k-means
// -> lookup -> merge -> recorrelate. Writes every checkpoint, the before/after
// table, the report (csv and text) and manifest.toml into cfg.output_dir.
RunReport run_pipeline(const PipelineConfig& cfg);

// Output file names inside the run directory.
namespace files {
inline constexpr const char* kIngested = "ingested.jsonl";
inline constexpr const char* kCounts = "counts.tsv";
inline constexpr const char* kScores = "scores.csv";
inline constexpr const char* kSelected = "selected.tsv";
inline constexpr const char* kFactors = "factors.txt";
inline constexpr const char* kLookup = "lookup.tsv";
inline constexpr const char* kMerged = "merged.tsv";
inline constexpr const char* kBeforeAfter = "before_after.csv";
inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kManifest = "manifest.toml";
inline constexpr const char* kRunSummary = "run_summary.json";
} // namespace files

// Default output directory: $DCM_OUTPUT_DIR when set, else "dcm_out".
std::filesystem::path default_output_dir();

} // namespace dcm
