#include <shadowjob/stats.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shadowjob {

FiveNumberSummary quartiles(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("quartiles: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();

    // p = k*n/4; integral p averages the p-th and (p+1)-th elements
    // (1-based), otherwise the ceil(p)-th element is taken.
    auto boundary = [&](std::size_t k) -> double {
        std::size_t kn = k * n;
        if (kn % 4 == 0) {
            std::size_t p = kn / 4; // 1-based
            return (values[p - 1] + values[p]) / 2.0;
        }
        std::size_t idx = (kn + 3) / 4; // ceil(kn/4), 1-based
        return values[idx - 1];
    };

    FiveNumberSummary s;
    s.min = values.front();
    s.max = values.back();
    s.q1 = boundary(1);
    s.median = boundary(2);
    s.q3 = boundary(3);
    return s;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");

    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt; // zero variance
    return sxy / std::sqrt(sxx * syy);
}

namespace {

struct UsableTriple {
    std::vector<double> distance, size, time;
};

void collect_usable(std::span<const ResolutionRecord> records,
                    std::optional<ErrorType> type, UsableTriple& out) {
    for (const ResolutionRecord& r : records) {
        if (type.has_value() && r.error.error_type != *type) continue;
        if (!r.resolution_distance.has_value()) continue;
        out.distance.push_back(static_cast<double>(*r.resolution_distance));
        out.size.push_back(static_cast<double>(r.resolution_size));
        out.time.push_back(static_cast<double>(r.resolution_time));
    }
}

CorrelationRow make_row(std::span<const ResolutionRecord> records,
                        std::optional<ErrorType> type) {
    UsableTriple u;
    collect_usable(records, type, u);

    CorrelationRow row;
    row.error_type = type;
    row.sample_count = static_cast<int>(u.distance.size());
    if (row.sample_count >= 2) {
        row.distance_size = pearson(u.distance, u.size);
        row.distance_time = pearson(u.distance, u.time);
        row.size_time = pearson(u.size, u.time);
    }
    return row;
}

} // namespace

std::vector<CorrelationRow> correlation_table(std::span<const ResolutionRecord> records,
                                              int top_k) {
    // Frequency per classified type; the sentinel never gets its own row.
    std::array<int, kErrorTypeCount> counts{};
    for (const ResolutionRecord& r : records) {
        ++counts[static_cast<int>(r.error.error_type)];
    }

    std::vector<int> order;
    for (int i = 0; i < kClassifiedTypeCount; ++i) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return counts[a] > counts[b]; });

    std::vector<CorrelationRow> rows;
    for (int i = 0; i < top_k && i < kClassifiedTypeCount; ++i) {
        rows.push_back(make_row(records, static_cast<ErrorType>(order[i])));
    }
    rows.push_back(make_row(records, std::nullopt)); // all errors
    return rows;
}

Distributions distributions(std::span<const ResolutionRecord> records) {
    Distributions d;
    d.total = static_cast<int>(records.size());
    for (const ResolutionRecord& r : records) {
        ++d.type_counts[static_cast<int>(r.error.error_type)];
        ++d.class_counts[static_cast<int>(r.error.error_class)];
        int bucket = std::min(std::max(r.resolution_size, 0), 7);
        ++d.size_histogram[bucket];
    }
    if (d.total > 0) {
        for (int i = 0; i < kErrorTypeCount; ++i) {
            d.type_percent[i] = 100.0 * d.type_counts[i] / d.total;
        }
        for (int i = 0; i < kErrorClassCount; ++i) {
            d.class_percent[i] = 100.0 * d.class_counts[i] / d.total;
        }
    }
    return d;
}

std::vector<double> normalize_times(std::span<const ResolutionRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    if (records.empty()) return out;

    std::int64_t lo = records.front().resolution_time;
    std::int64_t hi = lo;
    for (const ResolutionRecord& r : records) {
        lo = std::min(lo, r.resolution_time);
        hi = std::max(hi, r.resolution_time);
    }
    const double span = static_cast<double>(hi - lo);
    for (const ResolutionRecord& r : records) {
        out.push_back(span == 0.0 ? 0.0
                                  : static_cast<double>(r.resolution_time - lo) / span);
    }
    return out;
}

int HeatmapGrid::total() const {
    int n = 0;
    for (const auto& row : counts) {
        for (int c : row) n += c;
    }
    return n;
}

HeatmapGrid heatmap(std::span<const ResolutionRecord> records, ErrorType type) {
    HeatmapGrid grid;
    grid.error_type = type;
    for (const ResolutionRecord& r : records) {
        if (r.error.error_type != type) continue;
        if (!r.resolution_distance.has_value()) {
            ++grid.excluded_no_distance;
            continue;
        }
        int size_bin = std::min(std::max(r.resolution_size, 0), 7);
        int dist = *r.resolution_distance;
        int dist_bin = dist >= 100 ? 10 : dist / 10;
        ++grid.counts[dist_bin][size_bin];
    }
    return grid;
}

} // namespace shadowjob
