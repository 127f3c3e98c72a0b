#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <shadowjob/classify.hpp>
#include <shadowjob/corpus.hpp>

namespace shadowjob {

/// Deterministic random stream. The engine is the fully specified
/// mt19937_64; value mappings are hand-rolled so that draws do not depend
/// on the standard library's distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Index drawn proportionally to the given nonnegative weights.
    std::size_t discrete(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

/// A small sampler description, JSON-configurable:
///   {"kind":"constant","value":7}
///   {"kind":"uniform_int","min":60,"max":86400}
///   {"kind":"discrete","values":[2,3,4],"weights":[1,2,1]}
struct DistributionSpec {
    enum class Kind { Constant, UniformInt, Discrete };

    Kind kind = Kind::Constant;
    std::int64_t value = 0;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::vector<std::int64_t> values;
    std::vector<double> weights;

    static DistributionSpec constant(std::int64_t v);
    static DistributionSpec uniform_int(std::int64_t lo, std::int64_t hi);
    static DistributionSpec discrete(std::vector<std::int64_t> values,
                                     std::vector<double> weights);

    std::int64_t sample(SeededRng& rng) const;
    std::int64_t support_min() const;
    std::int64_t support_max() const;
};

/// Generator configuration. Defaults reproduce the reference error-type
/// mixture with independently sampled delay, size, and distance targets.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    int n_series = 1000;

    /// Probability per classified error type; must sum to 1 (+-1e-9).
    std::array<double, kClassifiedTypeCount> type_mixture{};

    DistributionSpec delay_model;    // fix delay, seconds >= 0
    DistributionSpec size_model;     // target resolution size, lines 0..12
    DistributionSpec distance_model; // target resolution distance, lines 0..120

    /// Optional override for the reported error line; by default the line
    /// is drawn uniformly within the synthetic file.
    std::optional<DistributionSpec> error_line_model;

    double extra_fail_prob = 0.25;   // chance a series has >1 failing build
    double alien_message_prob = 0.0; // chance of an unclassifiable message

    static ScenarioSpec defaults();
    static ScenarioSpec from_json_text(std::string_view text);
    static ScenarioSpec from_json_file(const std::filesystem::path& path);

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
};

/// Ground truth for one generated failure series.
struct ManifestRow {
    std::string change_id;
    ErrorType error_type = ErrorType::Unclassified;
    std::optional<std::string> file; // absent for linker failures
    std::optional<int> error_line;
    std::vector<int> fix_lines; // old-file coordinates, ascending
    std::int64_t true_time = 0;
    int true_size = 0;
    std::optional<int> true_distance;
};

struct GroundTruthManifest {
    std::vector<ManifestRow> rows;

    static GroundTruthManifest load(const std::filesystem::path& path);
};

namespace sim_detail {

/// Everything generated for one failure series, exposed for tests that
/// apply the fix patch to the pre-fix file or inspect the planned edits.
struct SeriesArtifacts {
    ManifestRow row;
    std::vector<BuildRecord> builds;              // time order; last is the fixing pass
    std::vector<std::string> patch_diffs;         // parallel to builds
    std::vector<std::optional<std::string>> logs; // parallel to builds; engaged for failures
    // Pre-fix content of every file edited by the fixing patch.
    std::vector<std::pair<std::string, std::string>> pre_fix_files;

    const std::string& fix_diff() const { return patch_diffs.back(); }
};

SeriesArtifacts make_series(const ScenarioSpec& spec, int series_index,
                            std::uint64_t sub_seed, std::int64_t base_time,
                            int* build_counter);

} // namespace sim_detail

/// Emits a complete corpus (builds.jsonl, logs/, patches/) under out_dir
/// together with manifest.jsonl, and returns the manifest. Generation is a
/// pure function of the spec; the same spec yields byte-identical output.
/// When emit_sources is set, the pre-fix content of every edited file is
/// additionally written under out_dir/sources/.
GroundTruthManifest generate(const ScenarioSpec& spec,
                             const std::filesystem::path& out_dir,
                             bool emit_sources = false);

} // namespace shadowjob
