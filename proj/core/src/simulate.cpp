#include <shadowjob/simulate.hpp>
#include <shadowjob/corpus.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace shadowjob {

// ---------------------------------------------------------------------------
// Deterministic sampling
// ---------------------------------------------------------------------------

std::int64_t SeededRng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
}

std::size_t SeededRng::discrete(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (total <= 0) throw std::invalid_argument("discrete: nonpositive weight sum");
    double u = uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

DistributionSpec DistributionSpec::constant(std::int64_t v) {
    DistributionSpec d;
    d.kind = Kind::Constant;
    d.value = v;
    return d;
}

DistributionSpec DistributionSpec::uniform_int(std::int64_t lo, std::int64_t hi) {
    DistributionSpec d;
    d.kind = Kind::UniformInt;
    d.min = lo;
    d.max = hi;
    return d;
}

DistributionSpec DistributionSpec::discrete(std::vector<std::int64_t> values,
                                            std::vector<double> weights) {
    DistributionSpec d;
    d.kind = Kind::Discrete;
    d.values = std::move(values);
    d.weights = std::move(weights);
    return d;
}

std::int64_t DistributionSpec::sample(SeededRng& rng) const {
    switch (kind) {
    case Kind::Constant: return value;
    case Kind::UniformInt: return rng.uniform_int(min, max);
    case Kind::Discrete: return values[rng.discrete(weights)];
    }
    return value;
}

std::int64_t DistributionSpec::support_min() const {
    switch (kind) {
    case Kind::Constant: return value;
    case Kind::UniformInt: return min;
    case Kind::Discrete: {
        std::int64_t lo = values.empty() ? 0 : values.front();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (weights[i] > 0) lo = std::min(lo, values[i]);
        }
        return lo;
    }
    }
    return value;
}

std::int64_t DistributionSpec::support_max() const {
    switch (kind) {
    case Kind::Constant: return value;
    case Kind::UniformInt: return max;
    case Kind::Discrete: {
        std::int64_t hi = values.empty() ? 0 : values.front();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (weights[i] > 0) hi = std::max(hi, values[i]);
        }
        return hi;
    }
    }
    return value;
}

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

namespace {

// Reference mixture, percent per classified type in taxonomy order.
constexpr double kDefaultMixturePercent[kClassifiedTypeCount] = {
    40.05, 20.18, 11.77, 8.89, 8.36, 2.76, 2.21,
    1.53,  1.14,  0.82,  0.73, 0.71, 0.49, 0.36,
};

DistributionSpec distribution_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw std::invalid_argument("distribution spec must be an object with a 'kind'");
    }
    std::string kind = j["kind"].get<std::string>();
    if (kind == "constant") {
        return DistributionSpec::constant(j.at("value").get<std::int64_t>());
    }
    if (kind == "uniform_int") {
        return DistributionSpec::uniform_int(j.at("min").get<std::int64_t>(),
                                             j.at("max").get<std::int64_t>());
    }
    if (kind == "discrete") {
        auto values = j.at("values").get<std::vector<std::int64_t>>();
        auto weights = j.at("weights").get<std::vector<double>>();
        if (values.size() != weights.size() || values.empty()) {
            throw std::invalid_argument("discrete distribution: values/weights mismatch");
        }
        return DistributionSpec::discrete(std::move(values), std::move(weights));
    }
    throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

} // namespace

ScenarioSpec ScenarioSpec::defaults() {
    ScenarioSpec s;
    s.seed = 1;
    s.n_series = 1000;
    for (int i = 0; i < kClassifiedTypeCount; ++i) {
        s.type_mixture[i] = kDefaultMixturePercent[i] / 100.0;
    }
    s.delay_model = DistributionSpec::uniform_int(60, 86400);
    s.size_model = DistributionSpec::discrete(
        {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12},
        {2, 10, 20, 27, 15, 8, 5, 4, 3, 2, 2, 1, 1});
    s.distance_model = DistributionSpec::uniform_int(0, 120);
    s.extra_fail_prob = 0.25;
    s.alien_message_prob = 0.0;
    return s;
}

ScenarioSpec ScenarioSpec::from_json_text(std::string_view text) {
    json j = json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("scenario spec must be a JSON object");

    ScenarioSpec s = defaults();
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") {
            s.seed = value.get<std::uint64_t>();
        } else if (key == "n_series") {
            s.n_series = value.get<int>();
        } else if (key == "type_mixture") {
            if (!value.is_object()) throw std::invalid_argument("type_mixture must be an object");
            s.type_mixture.fill(0.0);
            for (const auto& [name, p] : value.items()) {
                auto type = error_type_from_string(name);
                if (!type.has_value() || *type == ErrorType::Unclassified) {
                    throw std::invalid_argument("type_mixture: unknown error type '" + name + "'");
                }
                s.type_mixture[static_cast<int>(*type)] = p.get<double>();
            }
        } else if (key == "delay_model") {
            s.delay_model = distribution_from_json(value);
        } else if (key == "size_model") {
            s.size_model = distribution_from_json(value);
        } else if (key == "distance_model") {
            s.distance_model = distribution_from_json(value);
        } else if (key == "error_line_model") {
            s.error_line_model = distribution_from_json(value);
        } else if (key == "extra_fail_prob") {
            s.extra_fail_prob = value.get<double>();
        } else if (key == "alien_message_prob") {
            s.alien_message_prob = value.get<double>();
        } else {
            throw std::invalid_argument("scenario spec: unknown key '" + key + "'");
        }
    }
    s.validate();
    return s;
}

ScenarioSpec ScenarioSpec::from_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read scenario spec " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void ScenarioSpec::validate() const {
    if (n_series < 0) throw std::invalid_argument("n_series must be nonnegative");

    double sum = 0;
    for (double p : type_mixture) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("mixture probability out of [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("type_mixture probabilities must sum to 1");
    }
    if (extra_fail_prob < 0 || extra_fail_prob > 1 || alien_message_prob < 0 ||
        alien_message_prob > 1) {
        throw std::invalid_argument("probabilities must lie in [0,1]");
    }
    if (delay_model.support_min() < 0) {
        throw std::invalid_argument("delay_model support must be nonnegative");
    }
    if (size_model.support_min() < 0 || size_model.support_max() > 12) {
        throw std::invalid_argument("size_model support must lie in [0,12]");
    }
    if (distance_model.support_min() < 0 || distance_model.support_max() > 120) {
        throw std::invalid_argument("distance_model support must lie in [0,120]");
    }
    if (error_line_model.has_value() && error_line_model->support_min() < 1) {
        throw std::invalid_argument("error_line_model support must be >= 1");
    }
}

// ---------------------------------------------------------------------------
// Synthetic sources, edits, and diffs
// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kBaseEpoch = 1690000000;

std::string zero_pad(std::int64_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(v));
    return buf;
}

std::vector<std::string> make_source(const std::string& tag, int length) {
    std::vector<std::string> lines;
    lines.reserve(length);
    for (int i = 1; i <= length; ++i) {
        if (i % 7 == 0) {
            lines.push_back("// section " + tag + " " + std::to_string(i));
        } else {
            lines.push_back("int " + tag + "_v" + std::to_string(i) + " = " +
                            std::to_string(i) + ";");
        }
    }
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const std::string& l : lines) {
        out += l;
        out.push_back('\n');
    }
    return out;
}

// One edit against the pre-fix file: delete del_count lines starting at
// begin, then insert add_lines at that position.
struct EditSpec {
    int begin = 1;
    int del_count = 0;
    std::vector<std::string> add_lines;
};

std::vector<Hunk> hunks_for_edits(const std::vector<std::string>& old_lines,
                                  std::vector<EditSpec> edits) {
    std::sort(edits.begin(), edits.end(),
              [](const EditSpec& a, const EditSpec& b) { return a.begin < b.begin; });
    const int file_len = static_cast<int>(old_lines.size());
    std::vector<Hunk> hunks;
    int delta = 0;
    for (const EditSpec& e : edits) {
        const int end_excl = e.begin + e.del_count;
        const int ctx_before = std::min(3, e.begin - 1);
        const int ctx_after = std::min(3, file_len - end_excl + 1);

        Hunk h;
        h.old_start = e.begin - ctx_before;
        h.old_count = ctx_before + e.del_count + ctx_after;
        h.new_start = h.old_start + delta;
        h.new_count = h.old_count - e.del_count + static_cast<int>(e.add_lines.size());
        for (int i = h.old_start; i < e.begin; ++i) {
            h.lines.push_back({LineOp::Context, old_lines[i - 1]});
        }
        for (int i = e.begin; i < end_excl; ++i) {
            h.lines.push_back({LineOp::Del, old_lines[i - 1]});
        }
        for (const std::string& a : e.add_lines) {
            h.lines.push_back({LineOp::Add, a});
        }
        for (int i = end_excl; i < end_excl + ctx_after; ++i) {
            h.lines.push_back({LineOp::Context, old_lines[i - 1]});
        }
        hunks.push_back(std::move(h));
        delta += static_cast<int>(e.add_lines.size()) - e.del_count;
    }
    return hunks;
}

// Fix-line set the pipeline should recover: every deleted old line plus,
// per edit with insertions, the old line at the insertion point.
std::vector<int> planned_fix_lines(const std::vector<EditSpec>& edits) {
    std::vector<int> out;
    for (const EditSpec& e : edits) {
        for (int i = 0; i < e.del_count; ++i) out.push_back(e.begin + i);
        if (!e.add_lines.empty()) out.push_back(std::max(1, e.begin + e.del_count));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Message realization
// ---------------------------------------------------------------------------

const char* kSymbols[] = {"err", "cfg_handle", "hw_status", "retry_count", "probe_ctx", "dma_buf"};
const char* kTypeNames[] = {"ProductError", "HwRegister", "LinkDescriptor", "StatusWord", "TraceSink"};
const char* kMembers[] = {"sync_mode", "lane_count", "crc_mask", "retry_budget"};
const char* kHeaders[] = {"hw_regs.h", "board_cfg.h", "dma_ring.h", "trace_hooks.h"};
const char* kSignatures[] = {"void Widget::frob(int)", "int probe_bus(const Ctx&)",
                             "bool attach_ring(RingDesc*)"};
const char* kAssertTexts[] = {"size mismatch", "ring capacity must be a power of two",
                              "unsupported lane width"};
const char* kAlienTexts[] = {"frobnication matrix is unstable near", "phase alignment drifted in",
                             "internal resonance budget exhausted for"};

template <std::size_t N>
const char* pick(SeededRng& rng, const char* const (&pool)[N]) {
    return pool[static_cast<std::size_t>(rng.uniform_int(0, N - 1))];
}

// The produced message must classify to exactly the requested type (or to
// Unclassified for aliens). `fatal_marker` selects the "fatal error:" form.
std::string realize_message(ErrorType type, SeededRng& rng, bool& fatal_marker) {
    fatal_marker = false;
    std::string sym = pick(rng, kSymbols);
    std::string tn = pick(rng, kTypeNames);
    std::string member = pick(rng, kMembers);
    switch (type) {
    case ErrorType::WasNotDeclared: {
        std::string m = "'" + sym + "' was not declared in this scope";
        if (rng.bernoulli(0.5)) m += "; did you mean '" + std::string(pick(rng, kSymbols)) + "'?";
        return m;
    }
    case ErrorType::HasNoMemberNamed:
        return "'struct " + tn + "' has no member named '" + member + "'";
    case ErrorType::ExpectedBeforeToken: {
        static const char* kPairs[][2] = {
            {"';'", "'}'"}, {"')'", "';'"}, {"','", "')'"}, {"primary-expression", "'.'"}};
        const auto& p = kPairs[rng.uniform_int(0, 3)];
        return std::string("expected ") + p[0] + " before " + p[1] + " token";
    }
    case ErrorType::DoesNotNameAType:
        return "'" + tn + "' does not name a type";
    case ErrorType::NoDeclarationMatches:
        return std::string("no declaration matches '") + pick(rng, kSignatures) + "'";
    case ErrorType::NoSuchFileOrDirectory:
        fatal_marker = true;
        return std::string(pick(rng, kHeaders)) + ": No such file or directory";
    case ErrorType::LdReturned:
        return "ld returned 1 exit status";
    case ErrorType::InvalidConversion:
        return "invalid conversion from '" + tn + "*' to 'int' [-fpermissive]";
    case ErrorType::UnusedVariable:
        return "unused variable '" + sym + "' [-Werror=unused-variable]";
    case ErrorType::DoesNotHaveAnyFieldNamed:
        return "class '" + tn + "' does not have any field named '" + member + "'";
    case ErrorType::CannotAllocateAnObjectOf:
        return "cannot allocate an object of abstract type '" + tn + "'";
    case ErrorType::OfNonClassType:
        return "request for member '" + member + "' in '" + sym +
               "', which is of non-class type 'int'";
    case ErrorType::CannotConvert:
        return "cannot convert '" + tn + "' to 'const char*'";
    case ErrorType::StaticAssertionFailed:
        return std::string("static assertion failed: ") + pick(rng, kAssertTexts);
    case ErrorType::Unclassified:
        return std::string(pick(rng, kAlienTexts)) + " '" + sym + "'";
    }
    return "unreachable";
}

// ---------------------------------------------------------------------------
// Log rendering
// ---------------------------------------------------------------------------

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of('/');
    std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
    std::size_t dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

std::string make_locational_log(const std::string& build_id, const std::string& file,
                                int error_line, int column, const std::string& message,
                                bool fatal_marker, const std::string& error_line_text,
                                SeededRng& rng) {
    std::string stem = stem_of(file);
    std::string log;
    log += "[ci] build " + build_id + " started\n";
    log += "g++ -std=c++17 -O2 -Werror -c " + file + " -o build/obj/" + stem + ".o\n";
    if (rng.bernoulli(0.5)) {
        log += "In file included from src/common/prelude.hpp:18,\n";
        log += "                 from " + file + ":2:\n";
    }
    log += file + ": In function 'int run_cycle(int)':\n";
    log += file + ":" + std::to_string(error_line) + ":" + std::to_string(column) + ": " +
           (fatal_marker ? "fatal error: " : "error: ") + message + "\n";
    log += "  " + std::to_string(error_line) + " | " + error_line_text + "\n";
    log += "      |";
    log.append(static_cast<std::size_t>(std::min(column, 40)), ' ');
    log += "^\n";
    if (fatal_marker) {
        log += "compilation terminated.\n";
    } else if (rng.bernoulli(0.4)) {
        log += file + ":" + std::to_string(std::max(1, error_line - 2)) +
               ":5: warning: unused parameter 'mode' [-Wunused-parameter]\n";
    }
    log += "make: *** [Makefile:127: build/obj/" + stem + ".o] Error 1\n";
    return log;
}

std::string make_linker_log(const std::string& build_id, SeededRng& rng) {
    std::string log;
    log += "[ci] build " + build_id + " started\n";
    log += "g++ -o build/bin/product build/obj/main.o build/obj/hw_iface.o\n";
    log += "ld: build/obj/hw_iface.o: in function 'init_subsystem()':\n";
    log += "hw_iface.cpp:(.text+0x" + std::to_string(rng.uniform_int(16, 4096)) +
           "): undefined reference to 'hw_interface_probe()'\n";
    log += "collect2: error: ld returned 1 exit status\n";
    log += "make: *** [Makefile:210: build/bin/product] Error 2\n";
    return log;
}

// Small standalone one-line churn diff; every non-fixing build carries one.
std::string make_churn_diff(const std::string& tag, int salt) {
    std::vector<std::string> lines;
    for (int i = 1; i <= 9; ++i) {
        lines.push_back("int churn_" + tag + "_l" + std::to_string(i) + " = " +
                        std::to_string(i) + ";");
    }
    int p = 2 + salt % 6;
    EditSpec e;
    e.begin = p;
    e.del_count = 1;
    e.add_lines = {"int churn_" + tag + "_l" + std::to_string(p) + "_r" +
                   std::to_string(salt) + " = " + std::to_string(p) + ";"};

    Patch patch;
    FileChange fc;
    fc.path = "src/churn_" + tag + ".cpp";
    fc.kind = ChangeKind::Text;
    fc.hunks = hunks_for_edits(lines, {e});
    patch.file_changes.push_back(std::move(fc));
    return render_patch(patch);
}

} // namespace

// ---------------------------------------------------------------------------
// Series planning
// ---------------------------------------------------------------------------

namespace sim_detail {

namespace {

enum class EditShape { Insert, Delete, Replace };

struct PrimaryPlan {
    EditSpec primary;
    std::optional<EditSpec> secondary;
    int file_length = 0;
    int error_line = 0;
};

// Lines inserted by fixes; distinct from any pre-fix source line.
std::vector<std::string> fix_add_lines(const std::string& tag, int count, SeededRng& rng) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
        out.push_back("int " + tag + "_fix" + std::to_string(rng.uniform_int(100, 999)) + "_" +
                      std::to_string(i) + " = 0;");
    }
    return out;
}

// Places edits realizing exactly (size, distance) against the error line.
// Returns nullopt when the drawn geometry does not fit the file.
std::optional<PrimaryPlan> try_place(const std::string& tag, int file_length, int error_line,
                                     int size, int distance, SeededRng& rng) {
    PrimaryPlan plan;
    plan.file_length = file_length;
    plan.error_line = error_line;

    int primary_size = size;
    int secondary_size = 0;
    if (size >= 2 && rng.bernoulli(0.35)) {
        secondary_size = static_cast<int>(rng.uniform_int(1, std::min(3, size - 1)));
        primary_size = size - secondary_size;
    }

    EditShape shape;
    int del_count = 0, add_count = 0;
    if (primary_size == 1) {
        shape = rng.bernoulli(0.5) ? EditShape::Insert : EditShape::Delete;
    } else {
        double w[3] = {0.3, 0.2, 0.5};
        shape = static_cast<EditShape>(rng.discrete(w));
    }
    switch (shape) {
    case EditShape::Insert:
        add_count = primary_size;
        break;
    case EditShape::Delete:
        del_count = primary_size;
        break;
    case EditShape::Replace:
        del_count = static_cast<int>(rng.uniform_int(1, primary_size - 1));
        add_count = primary_size - del_count;
        break;
    }

    // The nearest fix line must land exactly `distance` from the error line;
    // remaining fix lines extend away from it.
    bool below_ok = false, above_ok = false;
    int below_begin = 0, above_begin = 0;
    switch (shape) {
    case EditShape::Insert:
        below_begin = error_line - distance;
        above_begin = error_line + distance;
        below_ok = below_begin >= 1;
        above_ok = above_begin <= file_length;
        break;
    case EditShape::Delete:
        below_begin = error_line - distance - del_count + 1;
        above_begin = error_line + distance;
        below_ok = below_begin >= 1;
        above_ok = above_begin + del_count - 1 <= file_length;
        break;
    case EditShape::Replace:
        below_begin = error_line - distance - del_count;
        above_begin = error_line + distance;
        below_ok = below_begin >= 1;
        above_ok = above_begin + del_count <= file_length; // keep the anchor inside the file
        break;
    }
    if (!below_ok && !above_ok) return std::nullopt;
    bool place_below = below_ok && (!above_ok || rng.bernoulli(0.5));

    plan.primary.begin = place_below ? below_begin : above_begin;
    plan.primary.del_count = del_count;
    if (add_count > 0) plan.primary.add_lines = fix_add_lines(tag, add_count, rng);

    if (secondary_size > 0) {
        // Single insertion on the opposite side, strictly farther out, far
        // enough that hunk contexts cannot touch.
        int d2 = static_cast<int>(std::max(distance, 1) + rng.uniform_int(8, 40));
        int anchor = place_below ? error_line + d2 : error_line - d2;
        if (anchor >= 1 && anchor <= file_length) {
            EditSpec sec;
            sec.begin = anchor;
            sec.add_lines = fix_add_lines(tag, secondary_size, rng);
            plan.secondary = std::move(sec);
        } else {
            return std::nullopt; // resample the whole geometry
        }
    }
    return plan;
}

} // namespace

SeriesArtifacts make_series(const ScenarioSpec& spec, int series_index,
                            std::uint64_t sub_seed, std::int64_t base_time,
                            int* build_counter) {
    SeededRng rng(sub_seed);
    SeriesArtifacts art;
    const std::string change_id = "c" + zero_pad(series_index, 6);
    const std::string tag = "u" + std::to_string(series_index);

    art.row.change_id = change_id;

    // Type, then the independent attribute targets.
    ErrorType type;
    if (rng.bernoulli(spec.alien_message_prob)) {
        type = ErrorType::Unclassified;
    } else {
        type = static_cast<ErrorType>(rng.discrete(spec.type_mixture));
    }
    art.row.error_type = type;
    const std::int64_t delay = spec.delay_model.sample(rng);
    const int size = static_cast<int>(spec.size_model.sample(rng));
    art.row.true_time = delay;
    art.row.true_size = size;

    // The fixing patch plus the pre-fix content of the files it touches.
    Patch fix_patch;
    std::string diag_file;
    int error_line = 0, column = 0;
    bool fatal_marker = false;
    std::string message;
    std::string error_line_text;

    if (type == ErrorType::LdReturned) {
        message = realize_message(type, rng, fatal_marker);
        int n_files = size >= 2 ? static_cast<int>(rng.uniform_int(2, 3)) : 1;
        n_files = std::min(n_files, std::max(size, 1));
        if (size == 0) {
            FileChange fc;
            fc.path = "config/link_order_" + zero_pad(series_index, 5) + ".txt";
            fc.kind = ChangeKind::ModeOnly;
            fix_patch.file_changes.push_back(std::move(fc));
        } else {
            std::vector<int> sizes(n_files, 1);
            for (int extra = 0; extra < size - n_files; ++extra) {
                ++sizes[rng.uniform_int(0, n_files - 1)];
            }
            for (int f = 0; f < n_files; ++f) {
                std::string ftag = tag + "d" + std::to_string(f);
                std::string path = "src/dep_" + zero_pad(series_index, 5) + "_" +
                                   std::to_string(f) + ".cpp";
                int len = static_cast<int>(rng.uniform_int(30, 80));
                std::vector<std::string> lines = make_source(ftag, len);
                int part = sizes[f];
                EditSpec e;
                if (part == 1) {
                    e.begin = static_cast<int>(rng.uniform_int(4, len - 4));
                    if (rng.bernoulli(0.5)) {
                        e.add_lines = fix_add_lines(ftag, 1, rng);
                    } else {
                        e.del_count = 1;
                    }
                } else {
                    e.del_count = static_cast<int>(rng.uniform_int(1, part - 1));
                    e.begin = static_cast<int>(rng.uniform_int(4, len - e.del_count - 4));
                    e.add_lines = fix_add_lines(ftag, part - e.del_count, rng);
                }
                FileChange fc;
                fc.path = path;
                fc.kind = ChangeKind::Text;
                fc.hunks = hunks_for_edits(lines, {e});
                fix_patch.file_changes.push_back(std::move(fc));
                art.pre_fix_files.emplace_back(path, join_lines(lines));
            }
        }
        // No file, no error line, no distance for linker failures.
    } else {
        diag_file = "src/unit_" + zero_pad(series_index, 5) + ".cpp";
        message = realize_message(type, rng, fatal_marker);
        column = static_cast<int>(rng.uniform_int(1, 60));

        std::vector<std::string> lines;
        std::optional<PrimaryPlan> plan;
        int distance = 0;
        for (int attempt = 0; attempt < 500 && !plan.has_value(); ++attempt) {
            int file_length = static_cast<int>(rng.uniform_int(60, 160));
            error_line = spec.error_line_model.has_value()
                             ? static_cast<int>(spec.error_line_model->sample(rng))
                             : static_cast<int>(rng.uniform_int(1, file_length));
            if (error_line > file_length) {
                file_length = error_line + static_cast<int>(rng.uniform_int(3, 40));
            }
            if (size == 0) {
                // Permission-style fix: the file is touched but no lines move.
                PrimaryPlan p;
                p.file_length = file_length;
                p.error_line = error_line;
                plan = p;
                break;
            }
            distance = static_cast<int>(spec.distance_model.sample(rng));
            plan = try_place(tag, file_length, error_line, size, distance, rng);
        }
        if (!plan.has_value()) {
            throw std::runtime_error("simulate: no feasible fix geometry for series " +
                                     std::to_string(series_index));
        }

        lines = make_source(tag, plan->file_length);
        error_line_text = lines[error_line - 1];
        art.row.file = diag_file;
        art.row.error_line = error_line;

        if (size == 0) {
            FileChange fc;
            fc.path = diag_file;
            fc.kind = ChangeKind::ModeOnly;
            fix_patch.file_changes.push_back(std::move(fc));
            art.pre_fix_files.emplace_back(diag_file, join_lines(lines));
        } else {
            std::vector<EditSpec> edits{plan->primary};
            if (plan->secondary.has_value()) edits.push_back(*plan->secondary);
            art.row.fix_lines = planned_fix_lines(edits);
            art.row.true_distance = distance;

            FileChange fc;
            fc.path = diag_file;
            fc.kind = ChangeKind::Text;
            fc.hunks = hunks_for_edits(lines, edits);
            fix_patch.file_changes.push_back(std::move(fc));
            art.pre_fix_files.emplace_back(diag_file, join_lines(lines));

            // Occasional unrelated file in the same fixing commit; it must
            // not count toward the per-file size or distance.
            if (rng.bernoulli(0.2)) {
                std::string xpath = "src/extra_" + zero_pad(series_index, 5) + ".cpp";
                if (rng.bernoulli(0.3)) {
                    FileChange xb;
                    xb.path = "assets/blob_" + zero_pad(series_index, 5) + ".bin";
                    xb.kind = ChangeKind::Binary;
                    fix_patch.file_changes.push_back(std::move(xb));
                } else {
                    std::string xtag = tag + "x";
                    int xlen = static_cast<int>(rng.uniform_int(20, 40));
                    std::vector<std::string> xlines = make_source(xtag, xlen);
                    EditSpec xe;
                    xe.begin = static_cast<int>(rng.uniform_int(4, xlen - 4));
                    xe.add_lines = fix_add_lines(xtag, static_cast<int>(rng.uniform_int(1, 3)), rng);
                    FileChange xf;
                    xf.path = xpath;
                    xf.kind = ChangeKind::Text;
                    xf.hunks = hunks_for_edits(xlines, {xe});
                    fix_patch.file_changes.push_back(std::move(xf));
                    art.pre_fix_files.emplace_back(xpath, join_lines(xlines));
                }
            }
        }
    }

    // Build timeline: optional leading pass, one or more failures, the fix.
    int n_fails = 1;
    if (rng.bernoulli(spec.extra_fail_prob)) {
        n_fails += static_cast<int>(rng.uniform_int(1, 2));
    }
    bool leading_pass = rng.bernoulli(0.2);

    auto next_build = [&](std::int64_t at, CompileStatus status) {
        BuildRecord b;
        int n = (*build_counter)++;
        b.build_id = "b" + zero_pad(n, 8);
        b.patch_id = "p" + zero_pad(n, 8);
        b.change_id = change_id;
        b.start_time = at;
        b.compile_status = status;
        if (status == CompileStatus::Fail) b.log_ref = "logs/" + b.build_id + ".log";
        return b;
    };

    std::int64_t t = base_time;
    if (leading_pass) {
        BuildRecord b = next_build(t, CompileStatus::Pass);
        art.patch_diffs.push_back(make_churn_diff(change_id + "lp", series_index));
        art.logs.push_back(std::nullopt);
        art.builds.push_back(std::move(b));
        t += rng.uniform_int(600, 7200);
    }
    for (int f = 0; f < n_fails; ++f) {
        BuildRecord b = next_build(t, CompileStatus::Fail);
        std::string log =
            (type == ErrorType::LdReturned)
                ? make_linker_log(b.build_id, rng)
                : make_locational_log(b.build_id, diag_file, error_line, column, message,
                                      fatal_marker, error_line_text, rng);
        art.logs.push_back(std::move(log));
        art.patch_diffs.push_back(make_churn_diff(change_id + "f" + std::to_string(f),
                                                  series_index + f));
        art.builds.push_back(std::move(b));
        if (f + 1 < n_fails) t += rng.uniform_int(30, 7200);
    }
    BuildRecord fix = next_build(t + delay, CompileStatus::Pass);
    art.patch_diffs.push_back(render_patch(fix_patch));
    art.logs.push_back(std::nullopt);
    art.builds.push_back(std::move(fix));

    return art;
}

} // namespace sim_detail

// ---------------------------------------------------------------------------
// Corpus emission
// ---------------------------------------------------------------------------

namespace {

json row_to_json(const ManifestRow& row) {
    json j;
    j["change_id"] = row.change_id;
    j["error_type"] = std::string(to_string(row.error_type));
    j["file"] = row.file.has_value() ? json(*row.file) : json(nullptr);
    j["error_line"] = row.error_line.has_value() ? json(*row.error_line) : json(nullptr);
    j["fix_lines"] = row.fix_lines;
    j["true_time"] = row.true_time;
    j["true_size"] = row.true_size;
    j["true_distance"] =
        row.true_distance.has_value() ? json(*row.true_distance) : json(nullptr);
    return j;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string build_to_jsonl(const BuildRecord& b) {
    json j;
    j["build_id"] = b.build_id;
    j["change_id"] = b.change_id;
    j["patch_id"] = b.patch_id;
    j["start_time"] = b.start_time;
    j["compile_status"] = b.compile_status == CompileStatus::Fail ? "fail" : "pass";
    j["log_ref"] = b.log_ref;
    return j.dump();
}

} // namespace

GroundTruthManifest GroundTruthManifest::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest " + path.string());
    GroundTruthManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ManifestRow row;
        row.change_id = j.at("change_id").get<std::string>();
        auto type = error_type_from_string(j.at("error_type").get<std::string>());
        if (!type.has_value()) throw std::runtime_error("manifest: unknown error type");
        row.error_type = *type;
        if (!j.at("file").is_null()) row.file = j["file"].get<std::string>();
        if (!j.at("error_line").is_null()) row.error_line = j["error_line"].get<int>();
        row.fix_lines = j.at("fix_lines").get<std::vector<int>>();
        row.true_time = j.at("true_time").get<std::int64_t>();
        row.true_size = j.at("true_size").get<int>();
        if (!j.at("true_distance").is_null()) {
            row.true_distance = j["true_distance"].get<int>();
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

GroundTruthManifest generate(const ScenarioSpec& spec, const fs::path& out_dir,
                             bool emit_sources) {
    spec.validate();
    fs::create_directories(out_dir / "logs");
    fs::create_directories(out_dir / "patches");
    if (emit_sources) fs::create_directories(out_dir / "sources");

    SeededRng master(spec.seed);
    const int n = spec.n_series;
    const int n_pass_only = n / 20;
    const int n_unresolved = n / 50;

    std::vector<std::uint64_t> series_seeds(n);
    for (auto& s : series_seeds) s = master.next_u64();
    std::vector<std::uint64_t> pass_seeds(n_pass_only);
    for (auto& s : pass_seeds) s = master.next_u64();
    std::vector<std::uint64_t> unresolved_seeds(n_unresolved);
    for (auto& s : unresolved_seeds) s = master.next_u64();

    int build_counter = 0;
    std::string builds_jsonl;
    std::string manifest_jsonl;
    GroundTruthManifest manifest;

    auto emit_builds = [&](const std::vector<BuildRecord>& builds,
                           const std::vector<std::string>& diffs,
                           const std::vector<std::optional<std::string>>& logs) {
        for (std::size_t i = 0; i < builds.size(); ++i) {
            builds_jsonl += build_to_jsonl(builds[i]);
            builds_jsonl.push_back('\n');
            write_file(out_dir / "patches" / (builds[i].patch_id + ".diff"), diffs[i]);
            if (logs[i].has_value()) {
                write_file(out_dir / "logs" / (builds[i].build_id + ".log"), *logs[i]);
            }
        }
    };

    for (int i = 0; i < n; ++i) {
        auto art = sim_detail::make_series(spec, i, series_seeds[i],
                                           kBaseEpoch + static_cast<std::int64_t>(i) * 100000,
                                           &build_counter);
        emit_builds(art.builds, art.patch_diffs, art.logs);
        if (emit_sources) {
            for (const auto& [path, content] : art.pre_fix_files) {
                fs::path p = out_dir / "sources" / path;
                fs::create_directories(p.parent_path());
                write_file(p, content);
            }
        }
        manifest_jsonl += row_to_json(art.row).dump();
        manifest_jsonl.push_back('\n');
        manifest.rows.push_back(std::move(art.row));
    }

    // Streams that never fail: builds only, no manifest rows.
    for (int i = 0; i < n_pass_only; ++i) {
        SeededRng rng(pass_seeds[i]);
        const std::string change_id = "px" + zero_pad(i, 6);
        std::int64_t t = kBaseEpoch + static_cast<std::int64_t>(n + i) * 100000;
        std::vector<BuildRecord> builds;
        std::vector<std::string> diffs;
        std::vector<std::optional<std::string>> logs;
        for (int b = 0; b < 2; ++b) {
            BuildRecord rec;
            int num = build_counter++;
            rec.build_id = "b" + zero_pad(num, 8);
            rec.patch_id = "p" + zero_pad(num, 8);
            rec.change_id = change_id;
            rec.start_time = t;
            rec.compile_status = CompileStatus::Pass;
            builds.push_back(std::move(rec));
            diffs.push_back(make_churn_diff(change_id + std::to_string(b), i + b));
            logs.push_back(std::nullopt);
            t += rng.uniform_int(60, 7200);
        }
        emit_builds(builds, diffs, logs);
    }

    // Streams whose failures are never fixed: surfaced as unresolved.
    for (int i = 0; i < n_unresolved; ++i) {
        SeededRng rng(unresolved_seeds[i]);
        const std::string change_id = "ux" + zero_pad(i, 6);
        std::int64_t t =
            kBaseEpoch + static_cast<std::int64_t>(n + n_pass_only + i) * 100000;
        int n_fails = static_cast<int>(rng.uniform_int(1, 2));
        std::vector<BuildRecord> builds;
        std::vector<std::string> diffs;
        std::vector<std::optional<std::string>> logs;
        for (int b = 0; b < n_fails; ++b) {
            BuildRecord rec;
            int num = build_counter++;
            rec.build_id = "b" + zero_pad(num, 8);
            rec.patch_id = "p" + zero_pad(num, 8);
            rec.change_id = change_id;
            rec.start_time = t;
            rec.compile_status = CompileStatus::Fail;
            rec.log_ref = "logs/" + rec.build_id + ".log";

            ErrorType type = static_cast<ErrorType>(rng.discrete(spec.type_mixture));
            bool fatal_marker = false;
            std::string message = realize_message(type, rng, fatal_marker);
            std::string file = "src/unres_" + zero_pad(i, 5) + ".cpp";
            std::string log;
            if (type == ErrorType::LdReturned) {
                log = make_linker_log(rec.build_id, rng);
            } else {
                int error_line = static_cast<int>(rng.uniform_int(1, 80));
                std::string text = "int unres_" + std::to_string(i) + "_v" +
                                   std::to_string(error_line) + " = 0;";
                log = make_locational_log(rec.build_id, file, error_line,
                                          static_cast<int>(rng.uniform_int(1, 40)), message,
                                          fatal_marker, text, rng);
            }
            builds.push_back(std::move(rec));
            diffs.push_back(make_churn_diff(change_id + std::to_string(b), i + b));
            logs.push_back(std::move(log));
            t += rng.uniform_int(60, 7200);
        }
        emit_builds(builds, diffs, logs);
    }

    write_file(out_dir / "builds.jsonl", builds_jsonl);
    write_file(out_dir / "manifest.jsonl", manifest_jsonl);
    return manifest;
}

} // namespace shadowjob
