#include <shadowjob/link.hpp>

#include <stdexcept>

namespace shadowjob {

LinkResult build_series(const CorpusStore& store) {
    LinkResult result;

    // Builds are already ordered (change_id, start_time, build_id), so one
    // linear scan visits each change stream in time order.
    const std::vector<BuildRecord>& builds = store.builds();
    std::size_t i = 0;
    while (i < builds.size()) {
        const std::string& change = builds[i].change_id;
        std::size_t end = i;
        while (end < builds.size() && builds[end].change_id == change) ++end;

        std::size_t j = i;
        while (j < end) {
            if (builds[j].compile_status != CompileStatus::Fail) {
                ++j;
                continue;
            }
            std::size_t run_begin = j;
            while (j < end && builds[j].compile_status == CompileStatus::Fail) ++j;
            if (j == end) {
                // Trailing failures with no fixing pass.
                ++result.unresolved_series;
                break;
            }
            FailureSeries s;
            s.change_id = change;
            s.failing_builds.assign(builds.begin() + run_begin, builds.begin() + j);
            s.fixing_build = builds[j];
            ++j; // the pass terminates exactly this series

            const BuildRecord& last_fail = s.failing_builds.back();
            const std::string* log = store.log_for(last_fail.build_id);
            if (log == nullptr) {
                throw std::runtime_error("build " + last_fail.build_id +
                                         ": failing build without a loaded log");
            }
            for (Diagnostic& d : extract_diagnostics(*log, last_fail.build_id)) {
                s.errors.push_back(classify(std::move(d)));
            }
            s.no_diagnostic = s.errors.empty();
            result.series.push_back(std::move(s));
        }
        i = end;
    }
    return result;
}

const Patch& fixing_patch(const FailureSeries& series, const CorpusStore& store) {
    const Patch* p = store.find_patch(series.fixing_build.patch_id);
    if (p == nullptr) {
        throw std::runtime_error("build " + series.fixing_build.build_id +
                                 ": dangling patch reference '" +
                                 series.fixing_build.patch_id + "'");
    }
    return *p;
}

} // namespace shadowjob
