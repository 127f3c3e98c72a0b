#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <shadowjob/stats.hpp>

namespace shadowjob {

struct ReportOptions {
    int top_k = 4;
    bool normalize_time = false;
};

struct AnomalyCounts {
    int unresolved_series = 0;
    int no_diagnostic_series = 0;
    int fix_elsewhere = 0;
    int undefined_distance = 0;
};

struct PerTypeSummary {
    int count = 0;
    FiveNumberSummary time;
    FiveNumberSummary size;
    std::optional<FiveNumberSummary> distance;
    int distance_count = 0;
};

struct AnalysisReport {
    std::string corpus_digest;
    std::string generated_with;
    Distributions distribution;
    std::map<ErrorType, PerTypeSummary> per_type_summaries;
    std::vector<CorrelationRow> correlations;
    std::vector<HeatmapGrid> heatmaps; // one per top-k type, table order
    AnomalyCounts anomalies;
    ReportOptions options;
    bool empty_input = false;
};

/// Assembles the report in memory; does not touch the filesystem.
AnalysisReport build_report(std::span<const ResolutionRecord> records,
                            const LinkResult& link,
                            const std::string& corpus_digest,
                            const ReportOptions& options);

/// Serializes report.json plus the CSV exports (types.csv, classes.csv,
/// summaries.csv, correlations.csv, heatmap_<type>.csv) into out_dir.
/// Output is byte-stable: fixed key order, LF endings, floats at six
/// significant digits.
void write_report_files(const AnalysisReport& report, const std::filesystem::path& out_dir);

/// build_report + write_report_files in one step.
AnalysisReport render_report(std::span<const ResolutionRecord> records,
                             const LinkResult& link,
                             const CorpusStore& store,
                             const ReportOptions& options,
                             const std::filesystem::path& out_dir);

std::string report_json_text(const AnalysisReport& report);

/// 64-bit FNV-1a over a byte sequence; the primitive behind corpus digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

} // namespace shadowjob
