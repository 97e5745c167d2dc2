#pragma once

#include "dcm/clustering.hpp"
#include "dcm/feature_id.hpp"
#include "dcm/metric.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dcm {

inline constexpr std::size_t kReportTopN = 100;

struct ScoreSummary {
    std::optional<double> max;       // nullopt when nothing was scored
    std::optional<double> mean_top;  // mean of the best min(top, scored) scores
    std::size_t scored = 0;
    std::size_t absent = 0;
};

// Absent scores are excluded from both statistics and counted separately.
ScoreSummary summarize_scores(const std::vector<std::optional<double>>& scores, std::size_t top = kReportTopN);

// One cell group of the before/after tables: a (form, metric) pair.
struct BeforeAfterSummary {
    WordForm form;
    Metric metric = Metric::Pearson;
    ScoreSummary before;
    ScoreSummary after;
};

// Throws dcm::Error on an empty table.
BeforeAfterSummary summarize(WordForm form, Metric metric, const std::vector<BeforeAfterRow>& table,
                             std::size_t top = kReportTopN);

enum class ReportFormat { Csv, Text };

ReportFormat parse_report_format(std::string_view id);

// Two tables (max score, mean of top-N) with one row per word form and a
// before/after column pair per metric.
std::string render_report(const std::vector<BeforeAfterSummary>& cells, ReportFormat format,
                          std::size_t top = kReportTopN);

void emit_report(const std::vector<BeforeAfterSummary>& cells, ReportFormat format,
                 const std::filesystem::path& path, std::size_t top = kReportTopN);

} // namespace dcm
