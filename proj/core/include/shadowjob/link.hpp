#pragma once

#include <string>
#include <vector>

#include <shadowjob/classify.hpp>
#include <shadowjob/corpus.hpp>

namespace shadowjob {

/// A maximal run of consecutive compile failures in one change stream,
/// terminated by the next passing build. Errors are drawn from the last
/// failing build's log.
struct FailureSeries {
    std::string change_id;
    std::vector<BuildRecord> failing_builds; // nonempty, time order
    BuildRecord fixing_build;                // compile_status == Pass
    std::vector<ClassifiedError> errors;
    bool no_diagnostic = false; // last failing log yielded no diagnostics
};

struct LinkResult {
    std::vector<FailureSeries> series; // ordered by (change_id, first failure time)
    int unresolved_series = 0;         // trailing failure runs with no fixing pass
};

/// Groups each change stream's builds into failure series. Trailing
/// failures with no subsequent pass are counted as unresolved rather than
/// emitted.
LinkResult build_series(const CorpusStore& store);

/// The patch of the first successful build after the series.
const Patch& fixing_patch(const FailureSeries& series, const CorpusStore& store);

} // namespace shadowjob
