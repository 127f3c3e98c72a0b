#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <shadowjob/metrics.hpp>

namespace shadowjob {

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;

    friend bool operator==(const FiveNumberSummary&, const FiveNumberSummary&) = default;
};

/// Five-number summary with quartile boundaries computed as follows: sort
/// ascending; for k in {1,2,3} let p = k*n/4; if p is an integer the
/// boundary is the average of the p-th and (p+1)-th elements (1-based),
/// otherwise it is the ceil(p)-th element. Throws on empty input.
FiveNumberSummary quartiles(std::vector<double> values);

/// Product-moment correlation. Returns nullopt when either series has zero
/// variance; throws on length mismatch or fewer than two points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
    std::optional<ErrorType> error_type; // nullopt = the all-errors row
    std::optional<double> distance_size;
    std::optional<double> distance_time;
    std::optional<double> size_time;
    int sample_count = 0;
};

/// Correlation rows for the top_k most frequent error types (ties broken
/// by taxonomy order) plus a final all-errors row. Coefficients are
/// computed over records whose distance is defined; rows with fewer than
/// two usable records report undefined coefficients.
std::vector<CorrelationRow> correlation_table(std::span<const ResolutionRecord> records,
                                              int top_k);

struct Distributions {
    std::array<int, kErrorTypeCount> type_counts{};
    std::array<double, kErrorTypeCount> type_percent{};
    std::array<int, kErrorClassCount> class_counts{};
    std::array<double, kErrorClassCount> class_percent{};
    std::array<int, 8> size_histogram{}; // buckets 0..6 and >=7
    int total = 0;
};

Distributions distributions(std::span<const ResolutionRecord> records);

/// Min-max normalization of resolution times to [0,1], over the full
/// record set; all-equal times map to 0.
std::vector<double> normalize_times(std::span<const ResolutionRecord> records);

inline constexpr int kHeatmapSizeBins = 8;      // 0..6, >=7
inline constexpr int kHeatmapDistanceBins = 11; // [0,10) .. [90,100), >=100

struct HeatmapGrid {
    ErrorType error_type = ErrorType::Unclassified;
    // counts[distance_bin][size_bin]
    std::array<std::array<int, kHeatmapSizeBins>, kHeatmapDistanceBins> counts{};
    int excluded_no_distance = 0;

    int total() const;
};

HeatmapGrid heatmap(std::span<const ResolutionRecord> records, ErrorType type);

} // namespace shadowjob
