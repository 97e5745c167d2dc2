#include "dcm/report.hpp"

#include "dcm/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace dcm {

namespace {

constexpr Metric kMetricOrder[] = {Metric::Pearson, Metric::Spearman, Metric::Kendall,
                                   Metric::DistanceCorrelation, Metric::MutualInformation};

std::string metric_title(Metric m) {
    switch (m) {
    case Metric::Pearson:
        return "Pearson";
    case Metric::Spearman:
        return "Spearman";
    case Metric::Kendall:
        return "Kendall";
    case Metric::DistanceCorrelation:
        return "Distance correlation";
    case Metric::MutualInformation:
        return "Mutual info";
    }
    return "?";
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

} // namespace

ScoreSummary summarize_scores(const std::vector<std::optional<double>>& scores, std::size_t top) {
    ScoreSummary s;
    std::vector<double> defined;
    for (const auto& v : scores) {
        if (v) {
            defined.push_back(*v);
        } else {
            ++s.absent;
        }
    }
    s.scored = defined.size();
    if (defined.empty()) return s;
    std::sort(defined.begin(), defined.end(), std::greater<>());
    s.max = defined.front();
    const auto used = std::min(top, defined.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < used; ++i) sum += defined[i];
    s.mean_top = sum / static_cast<double>(used);
    return s;
}

BeforeAfterSummary summarize(WordForm form, Metric metric, const std::vector<BeforeAfterRow>& table,
                             std::size_t top) {
    if (table.empty()) throw Error("cannot summarize an empty before/after table");
    std::vector<std::optional<double>> before, after;
    for (const auto& r : table) {
        before.push_back(r.before);
        after.push_back(r.after);
    }
    return {form, metric, summarize_scores(before, top), summarize_scores(after, top)};
}

ReportFormat parse_report_format(std::string_view id) {
    if (id == "csv") return ReportFormat::Csv;
    if (id == "text") return ReportFormat::Text;
    throw Error("unknown report format '" + std::string(id) + "' (expected csv|text)");
}

std::string render_report(const std::vector<BeforeAfterSummary>& cells, ReportFormat format, std::size_t top) {
    if (cells.empty()) throw Error("cannot render an empty report");

    // Rows in first-seen form order, columns in canonical metric order.
    std::vector<WordForm> forms;
    std::vector<Metric> metrics;
    for (const auto& c : cells) {
        if (std::find(forms.begin(), forms.end(), c.form) == forms.end()) forms.push_back(c.form);
    }
    for (auto m : kMetricOrder) {
        if (std::any_of(cells.begin(), cells.end(), [&](const auto& c) { return c.metric == m; })) {
            metrics.push_back(m);
        }
    }
    const auto find = [&](WordForm f, Metric m) -> const BeforeAfterSummary* {
        for (const auto& c : cells) {
            if (c.form == f && c.metric == m) return &c;
        }
        return nullptr;
    };

    struct Table {
        std::string name;
        std::string title;
        std::function<std::optional<double>(const ScoreSummary&)> pick;
    };
    const std::vector<Table> tables = {
        {"max", "Correlation score of the top feature, before and after merging",
         [](const ScoreSummary& s) { return s.max; }},
        {"mean_top" + std::to_string(top),
         "Average correlation score of the top " + std::to_string(top) + " features, before and after merging",
         [](const ScoreSummary& s) { return s.mean_top; }},
    };

    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "table,form";
        for (auto m : metrics) out << ',' << to_string(m) << "_before," << to_string(m) << "_after";
        out << '\n';
        for (const auto& t : tables) {
            for (const auto& f : forms) {
                out << t.name << ',' << f.label();
                for (auto m : metrics) {
                    const auto* c = find(f, m);
                    out << ',' << (c ? fmt(t.pick(c->before)) : "") << ',' << (c ? fmt(t.pick(c->after)) : "");
                }
                out << '\n';
            }
        }
    } else {
        const std::size_t label_w = 13, cell_w = 9;
        const std::size_t group_w = 2 * cell_w + 1;
        for (const auto& t : tables) {
            out << t.title << '\n';
            std::string head1 = pad("", label_w), head2 = pad("", label_w);
            for (auto m : metrics) {
                head1 += "| " + pad(metric_title(m), group_w) + ' ';
                head2 += "| " + pad_left("before", cell_w) + ' ' + pad_left("after", cell_w) + ' ';
            }
            out << head1 << '\n' << head2 << '\n';
            out << std::string(head2.size(), '-') << '\n';
            for (const auto& f : forms) {
                std::string line = pad(f.label(), label_w);
                for (auto m : metrics) {
                    const auto* c = find(f, m);
                    line += "| " + pad_left(c ? fmt(t.pick(c->before)) : "-", cell_w) + ' ' +
                            pad_left(c ? fmt(t.pick(c->after)) : "-", cell_w) + ' ';
                }
                out << line << '\n';
            }
            out << '\n';
        }
    }

    // Footnotes for excluded (undefined) scores.
    for (const auto& c : cells) {
        if (c.before.absent == 0 && c.after.absent == 0) continue;
        out << "# " << c.form.label() << '/' << to_string(c.metric) << ": " << c.before.absent
            << " absent before, " << c.after.absent << " absent after (excluded)\n";
    }
    return out.str();
}

void emit_report(const std::vector<BeforeAfterSummary>& cells, ReportFormat format,
                 const std::filesystem::path& path, std::size_t top) {
    const auto text = render_report(cells, format, top);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report '" + path.string() + "'");
    out << text;
}

} // namespace dcm
