#include <shadowjob/report.hpp>
#include <shadowjob/version.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace shadowjob {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

// Six significant digits, both for CSV text and for the values embedded in
// report.json, so that regeneration is byte-stable and CSVs re-parse to the
// reported values.
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double round6(double v) { return std::strtod(fmt6(v).c_str(), nullptr); }

json num6(double v) { return json(round6(v)); }

json opt_num6(const std::optional<double>& v) {
    if (!v.has_value()) return json(nullptr);
    return num6(*v);
}

json summary_json(const FiveNumberSummary& s) {
    json j;
    j["min"] = num6(s.min);
    j["q1"] = num6(s.q1);
    j["median"] = num6(s.median);
    j["q3"] = num6(s.q3);
    j["max"] = num6(s.max);
    return j;
}

std::string correlation_row_label(const CorrelationRow& row) {
    return row.error_type.has_value() ? std::string(to_string(*row.error_type))
                                      : std::string("AllErrors");
}

const char* kDistanceBinLabels[kHeatmapDistanceBins] = {
    "[0,10)",  "[10,20)", "[20,30)", "[30,40)", "[40,50)",  "[50,60)",
    "[60,70)", "[70,80)", "[80,90)", "[90,100)", ">=100",
};

const char* kSizeBinLabels[kHeatmapSizeBins] = {
    "size_0", "size_1", "size_2", "size_3", "size_4", "size_5", "size_6", "size_ge7",
};

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string csv_undefined(const std::optional<double>& v) {
    return v.has_value() ? fmt6(*v) : "NA";
}

} // namespace

AnalysisReport build_report(std::span<const ResolutionRecord> records,
                            const LinkResult& link,
                            const std::string& corpus_digest,
                            const ReportOptions& options) {
    AnalysisReport rep;
    rep.corpus_digest = corpus_digest;
    rep.generated_with = std::string(kToolName) + " " + kToolVersion;
    rep.options = options;
    rep.empty_input = records.empty();

    rep.distribution = distributions(records);
    rep.correlations = correlation_table(records, options.top_k);

    rep.anomalies.unresolved_series = link.unresolved_series;
    for (const FailureSeries& s : link.series) {
        if (s.no_diagnostic) ++rep.anomalies.no_diagnostic_series;
    }
    for (const ResolutionRecord& r : records) {
        if (r.fix_elsewhere) ++rep.anomalies.fix_elsewhere;
        if (!r.resolution_distance.has_value()) ++rep.anomalies.undefined_distance;
    }

    // Per-type five-number summaries; the time attribute honors the
    // normalize_time option (min-max over the whole record set).
    std::vector<double> time_values;
    if (options.normalize_time) {
        time_values = normalize_times(records);
    } else {
        time_values.reserve(records.size());
        for (const ResolutionRecord& r : records) {
            time_values.push_back(static_cast<double>(r.resolution_time));
        }
    }
    for (int t = 0; t < kErrorTypeCount; ++t) {
        ErrorType type = static_cast<ErrorType>(t);
        std::vector<double> times, sizes, distances;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].error.error_type != type) continue;
            times.push_back(time_values[i]);
            sizes.push_back(static_cast<double>(records[i].resolution_size));
            if (records[i].resolution_distance.has_value()) {
                distances.push_back(static_cast<double>(*records[i].resolution_distance));
            }
        }
        if (times.empty()) continue;
        PerTypeSummary s;
        s.count = static_cast<int>(times.size());
        s.time = quartiles(times);
        s.size = quartiles(sizes);
        s.distance_count = static_cast<int>(distances.size());
        if (!distances.empty()) s.distance = quartiles(distances);
        rep.per_type_summaries.emplace(type, std::move(s));
    }

    // Heatmaps for the same types the correlation table selected.
    for (const CorrelationRow& row : rep.correlations) {
        if (!row.error_type.has_value()) continue;
        rep.heatmaps.push_back(heatmap(records, *row.error_type));
    }
    return rep;
}

std::string report_json_text(const AnalysisReport& rep) {
    json j;
    j["corpus_digest"] = rep.corpus_digest;
    j["generated_with"] = rep.generated_with;
    j["options"] = {{"top_k", rep.options.top_k},
                    {"normalize_time", rep.options.normalize_time}};
    j["warnings"] = json::array();
    if (rep.empty_input) j["warnings"].push_back("empty record set");

    json types = json::array();
    for (int i = 0; i < kErrorTypeCount; ++i) {
        ErrorType t = static_cast<ErrorType>(i);
        types.push_back({{"type", std::string(to_string(t))},
                         {"count", rep.distribution.type_counts[i]},
                         {"percent", num6(rep.distribution.type_percent[i])}});
    }
    j["type_distribution"] = std::move(types);

    json classes = json::array();
    for (int i = 0; i < kErrorClassCount; ++i) {
        ErrorClass c = static_cast<ErrorClass>(i);
        classes.push_back({{"class", std::string(to_string(c))},
                           {"count", rep.distribution.class_counts[i]},
                           {"percent", num6(rep.distribution.class_percent[i])}});
    }
    j["class_distribution"] = std::move(classes);

    json hist = json::array();
    for (int i = 0; i < 8; ++i) {
        hist.push_back({{"bucket", i == 7 ? ">=7" : std::to_string(i)},
                        {"count", rep.distribution.size_histogram[i]}});
    }
    j["size_histogram"] = std::move(hist);

    json summaries = json::object();
    for (const auto& [type, s] : rep.per_type_summaries) {
        json e;
        e["count"] = s.count;
        e["time"] = summary_json(s.time);
        e["size"] = summary_json(s.size);
        e["distance"] = s.distance.has_value() ? summary_json(*s.distance) : json(nullptr);
        e["distance_count"] = s.distance_count;
        summaries[std::string(to_string(type))] = std::move(e);
    }
    j["per_type_summaries"] = std::move(summaries);

    json correlations = json::array();
    for (const CorrelationRow& row : rep.correlations) {
        correlations.push_back({{"error_type", correlation_row_label(row)},
                                {"distance_size", opt_num6(row.distance_size)},
                                {"distance_time", opt_num6(row.distance_time)},
                                {"size_time", opt_num6(row.size_time)},
                                {"sample_count", row.sample_count}});
    }
    j["correlations"] = std::move(correlations);

    json heatmaps = json::array();
    for (const HeatmapGrid& g : rep.heatmaps) {
        json rows = json::array();
        for (int d = 0; d < kHeatmapDistanceBins; ++d) {
            json cells = json::array();
            for (int sbin = 0; sbin < kHeatmapSizeBins; ++sbin) {
                cells.push_back(g.counts[d][sbin]);
            }
            rows.push_back(std::move(cells));
        }
        heatmaps.push_back({{"error_type", std::string(to_string(g.error_type))},
                            {"counts", std::move(rows)},
                            {"excluded_no_distance", g.excluded_no_distance}});
    }
    j["heatmaps"] = std::move(heatmaps);

    j["anomalies"] = {{"unresolved_series", rep.anomalies.unresolved_series},
                      {"no_diagnostic_series", rep.anomalies.no_diagnostic_series},
                      {"fix_elsewhere", rep.anomalies.fix_elsewhere},
                      {"undefined_distance", rep.anomalies.undefined_distance}};

    return j.dump(2) + "\n";
}

void write_report_files(const AnalysisReport& rep, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir)) {
        throw std::runtime_error("cannot create output directory " + out_dir.string());
    }

    write_text_file(out_dir / "report.json", report_json_text(rep));

    std::string types = "type,count,percent\n";
    for (int i = 0; i < kErrorTypeCount; ++i) {
        types += std::string(to_string(static_cast<ErrorType>(i))) + "," +
                 std::to_string(rep.distribution.type_counts[i]) + "," +
                 fmt6(rep.distribution.type_percent[i]) + "\n";
    }
    write_text_file(out_dir / "types.csv", types);

    std::string classes = "class,count,percent\n";
    for (int i = 0; i < kErrorClassCount; ++i) {
        classes += std::string(to_string(static_cast<ErrorClass>(i))) + "," +
                   std::to_string(rep.distribution.class_counts[i]) + "," +
                   fmt6(rep.distribution.class_percent[i]) + "\n";
    }
    write_text_file(out_dir / "classes.csv", classes);

    std::string summaries = "type,metric,count,min,q1,median,q3,max\n";
    auto add_summary = [&](std::string_view type, const char* metric, int count,
                           const FiveNumberSummary& s) {
        summaries += std::string(type) + "," + metric + "," + std::to_string(count) + "," +
                     fmt6(s.min) + "," + fmt6(s.q1) + "," + fmt6(s.median) + "," +
                     fmt6(s.q3) + "," + fmt6(s.max) + "\n";
    };
    for (const auto& [type, s] : rep.per_type_summaries) {
        add_summary(to_string(type), "time", s.count, s.time);
        add_summary(to_string(type), "size", s.count, s.size);
        if (s.distance.has_value()) {
            add_summary(to_string(type), "distance", s.distance_count, *s.distance);
        }
    }
    write_text_file(out_dir / "summaries.csv", summaries);

    std::string correlations = "error_type,distance_size,distance_time,size_time,sample_count\n";
    for (const CorrelationRow& row : rep.correlations) {
        correlations += correlation_row_label(row) + "," + csv_undefined(row.distance_size) +
                        "," + csv_undefined(row.distance_time) + "," +
                        csv_undefined(row.size_time) + "," +
                        std::to_string(row.sample_count) + "\n";
    }
    write_text_file(out_dir / "correlations.csv", correlations);

    for (const HeatmapGrid& g : rep.heatmaps) {
        std::string csv = "distance_bin";
        for (const char* label : kSizeBinLabels) csv += std::string(",") + label;
        csv += "\n";
        for (int d = 0; d < kHeatmapDistanceBins; ++d) {
            csv += kDistanceBinLabels[d];
            for (int sbin = 0; sbin < kHeatmapSizeBins; ++sbin) {
                csv += "," + std::to_string(g.counts[d][sbin]);
            }
            csv += "\n";
        }
        write_text_file(out_dir / ("heatmap_" + std::string(to_string(g.error_type)) + ".csv"),
                        csv);
    }
}

AnalysisReport render_report(std::span<const ResolutionRecord> records,
                             const LinkResult& link,
                             const CorpusStore& store,
                             const ReportOptions& options,
                             const fs::path& out_dir) {
    AnalysisReport rep = build_report(records, link, store.content_digest(), options);
    write_report_files(rep, out_dir);
    return rep;
}

} // namespace shadowjob
