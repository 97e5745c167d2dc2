#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dcm {

// Seeded corpus with planted synonym clusters. Every planted token is a weak
// event signal on its own; the sum over a cluster is a strong one.
struct SyntheticSpec {
    int days = 120;
    std::string start_date = "2016-01-01";
    std::size_t background_features = 200;
    double background_rate = 2.0;    // Poisson mean per token per day
    std::size_t planted_clusters = 4;
    std::size_t synonyms = 5;        // tokens per planted cluster
    std::size_t event_days = 10;
    double spike_magnitude = 10.0;   // extra mean per cluster on event days, split across synonyms
    std::int64_t events_per_day = 2; // GSR count on an event day
    std::size_t decoys_per_day = 3;  // tweets the pipeline must drop (URL or other city)
    std::string location = "Melbourne, Victoria";
    std::uint64_t seed = 20160101;

    // Throws dcm::Error when event days do not fit or the spike does not
    // exceed the background rate.
    void validate() const;
};

struct SyntheticCorpus {
    std::vector<int> event_days;                      // sorted ordinals
    std::vector<std::string> background_tokens;
    std::vector<std::vector<std::string>> planted;    // planted[c] = synonyms of cluster c
    std::vector<std::vector<std::int64_t>> planted_counts;     // [token][day], cluster-major
    std::vector<std::int64_t> gsr;
};

// Writes `corpus.jsonl`, `gsr.csv` and `planted.tsv` (cluster<TAB>token) into
// `dir` and returns what was planted.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir);

} // namespace dcm
