#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <shadowjob/link.hpp>

namespace shadowjob {

/// A classified error joined to its fixing patch.
///
/// fix_lines are pre-fix (old-file) line numbers in the diagnostic's file:
/// every deleted line's old number, plus, for each contiguous run of added
/// lines, the old line before which the insertion lands. The distance is
/// the minimum absolute offset between the diagnostic's line and any fix
/// line; it is absent when either side is missing.
struct ResolutionRecord {
    ClassifiedError error;
    std::string change_id;
    std::int64_t resolution_time = 0; // seconds
    int resolution_size = 0;          // added + deleted lines
    std::optional<int> resolution_distance;
    std::vector<int> fix_lines;
    bool fix_elsewhere = false; // patch does not touch the diagnostic's file
};

/// Start of the fixing build minus start of the last failing build.
std::int64_t resolution_time(const FailureSeries& series);

/// Old-file fix line numbers for one file of a patch; deduplicated and
/// ascending. Empty when the patch does not touch the file or the change
/// is binary / mode-only.
std::vector<int> fix_line_numbers(const Patch& patch, std::string_view file);

/// min over fix_lines of |fix_line - error_line|. fix_lines must be nonempty.
int resolution_distance(int error_line, const std::vector<int>& fix_lines);

/// Added + deleted lines of the file's change; 0 for binary or mode-only
/// changes and for files the patch does not touch.
int resolution_size(const Patch& patch, std::string_view file);

/// Added + deleted lines summed over every file of the patch.
int patch_total_size(const Patch& patch);

/// One record per classified error of each series. Size and distance are
/// computed against the diagnostic's file; errors without a file (linker
/// failures) get the whole-patch size and no distance.
std::vector<ResolutionRecord> compute_resolutions(const std::vector<FailureSeries>& series_list,
                                                  const CorpusStore& store);

} // namespace shadowjob
