#include <shadowjob/metrics.hpp>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace shadowjob {

std::int64_t resolution_time(const FailureSeries& series) {
    if (series.failing_builds.empty()) {
        throw std::invalid_argument("series without failing builds");
    }
    std::int64_t t = series.fixing_build.start_time - series.failing_builds.back().start_time;
    if (t < 0) {
        throw std::logic_error("corpus ordering violation: fixing build before last failure");
    }
    return t;
}

namespace {

int per_change_size(const FileChange& fc) {
    if (fc.kind != ChangeKind::Text) return 0;
    int n = 0;
    for (const Hunk& h : fc.hunks) {
        for (const HunkLine& l : h.lines) {
            if (l.op != LineOp::Context) ++n;
        }
    }
    return n;
}

} // namespace

std::vector<int> fix_line_numbers(const Patch& patch, std::string_view file) {
    const FileChange* fc = patch.find_file(file);
    if (fc == nullptr || fc->kind != ChangeKind::Text) return {};

    std::vector<int> out;
    for (const Hunk& h : fc->hunks) {
        // Next old-side line to be consumed. A zero-count old range names
        // the line *before* the gap, hence the +1.
        int old_line = (h.old_count > 0) ? h.old_start : h.old_start + 1;
        bool in_add_run = false;
        for (const HunkLine& l : h.lines) {
            switch (l.op) {
            case LineOp::Context:
                in_add_run = false;
                ++old_line;
                break;
            case LineOp::Del:
                out.push_back(old_line);
                in_add_run = false;
                ++old_line;
                break;
            case LineOp::Add:
                // A contiguous run of added lines anchors once, at the first
                // old line after the insertion point.
                if (!in_add_run) {
                    out.push_back(std::max(1, old_line));
                    in_add_run = true;
                }
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int resolution_distance(int error_line, const std::vector<int>& fix_lines) {
    if (fix_lines.empty()) {
        throw std::invalid_argument("resolution_distance: empty fix line list");
    }
    int best = std::abs(fix_lines.front() - error_line);
    for (int f : fix_lines) best = std::min(best, std::abs(f - error_line));
    return best;
}

int resolution_size(const Patch& patch, std::string_view file) {
    const FileChange* fc = patch.find_file(file);
    if (fc == nullptr) return 0;
    return per_change_size(*fc);
}

int patch_total_size(const Patch& patch) {
    int n = 0;
    for (const FileChange& fc : patch.file_changes) n += per_change_size(fc);
    return n;
}

std::vector<ResolutionRecord> compute_resolutions(const std::vector<FailureSeries>& series_list,
                                                  const CorpusStore& store) {
    std::vector<ResolutionRecord> out;
    for (const FailureSeries& series : series_list) {
        const std::int64_t time = resolution_time(series);
        const Patch& patch = fixing_patch(series, store);

        for (const ClassifiedError& err : series.errors) {
            ResolutionRecord rec;
            rec.error = err;
            rec.change_id = series.change_id;
            rec.resolution_time = time;

            if (err.diagnostic.file.has_value()) {
                const std::string& file = *err.diagnostic.file;
                if (patch.find_file(file) == nullptr) {
                    rec.fix_elsewhere = true;
                    rec.resolution_size = 0;
                } else {
                    rec.resolution_size = resolution_size(patch, file);
                }
                rec.fix_lines = fix_line_numbers(patch, file);
                if (err.diagnostic.line.has_value() && !rec.fix_lines.empty()) {
                    rec.resolution_distance =
                        resolution_distance(*err.diagnostic.line, rec.fix_lines);
                }
            } else {
                // File-less diagnostics (linker failures) take the size of
                // the whole patch and have no distance.
                rec.resolution_size = patch_total_size(patch);
            }
            out.push_back(std::move(rec));
        }
    }
    return out;
}

} // namespace shadowjob
