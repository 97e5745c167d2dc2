#pragma once

#include "dcm/clustering.hpp"
#include "dcm/corpus_ingest.hpp"
#include "dcm/count_matrix.hpp"
#include "dcm/factorization.hpp"

#include <filesystem>
#include <vector>

// Text checkpoints written between pipeline stages. Every reader accepts
// exactly what the matching writer produces; floating-point values are
// written with 17 significant digits so they round-trip bit-exactly.
namespace dcm {

// One row per line: `form:n:tok1+tok2<TAB>c1,c2,...,cn`.
void write_count_matrix(const CountMatrix& m, const std::filesystem::path& path);
CountMatrix read_count_matrix(const std::filesystem::path& path);

// CSV `feature,score` in ranked order; undefined scores are written as NA.
void write_scores(const std::vector<ScoredFeature>& scores, const std::filesystem::path& path);

// Text dump:
//   dcm-factors 1
//   shape <m> <n> <r> <numerical_rank>
//   features            (m feature ids, one per line)
//   sigma               (one line, r values)
//   u                   (m lines of r values)
//   vt                  (r lines of n values)
void write_factors(const FactoredMatrix& f, const std::filesystem::path& path);
FactoredMatrix read_factors(const std::filesystem::path& path);

// TSV `member<TAB>medoid`, sorted by member.
void write_lookup(const ClusterLookup& lookup, const std::filesystem::path& path);
ClusterLookup read_lookup(const std::filesystem::path& path);

// CSV `medoid,members,before,after`; undefined scores are written as NA.
void write_before_after(const std::vector<BeforeAfterRow>& rows, const std::filesystem::path& path);
std::vector<BeforeAfterRow> read_before_after(const std::filesystem::path& path);

// Ingested tweets as JSON lines with the day ordinal attached:
// {"day":3,"ts":"2016-01-04","text":"...","loc":"...","lang":"en"}
void write_ingested(const std::vector<DatedTweet>& tweets, const std::filesystem::path& path);
std::vector<DatedTweet> read_ingested(const std::filesystem::path& path);

std::string format_double(double v);

} // namespace dcm
