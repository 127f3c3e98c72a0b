#include <benchmark/benchmark.h>

#include <shadowjob/classify.hpp>
#include <shadowjob/corpus.hpp>
#include <shadowjob/link.hpp>
#include <shadowjob/logparse.hpp>
#include <shadowjob/metrics.hpp>
#include <shadowjob/simulate.hpp>

#include <filesystem>
#include <string>

namespace fs = std::filesystem;
using namespace shadowjob;

namespace {

const char* kMessages[] = {
    "'err' was not declared in this scope",
    "'struct DmaRing' has no member named 'lane_count'",
    "expected ';' before '}' token",
    "'ProductError' does not name a type",
    "no declaration matches 'void Widget::frob(int)'",
    "hw_regs.h: No such file or directory",
    "ld returned 1 exit status",
    "cannot convert 'ProductError' to 'const char*'",
    "something entirely unmatched by the taxonomy",
};

void BM_ClassifyMessage(benchmark::State& state) {
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify_message(kMessages[i % std::size(kMessages)]));
        ++i;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_ClassifyMessage);

void BM_ExtractDiagnostics(benchmark::State& state) {
    std::string log;
    for (int i = 0; i < 40; ++i) {
        log += "g++ -c src/f" + std::to_string(i) + ".cpp\n";
        log += "src/f" + std::to_string(i) +
               ".cpp:42:7: error: 'err' was not declared in this scope\n";
        log += "  42 |   use(err);\n      |       ^\n";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_diagnostics(log, "b1"));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(log.size()));
}
BENCHMARK(BM_ExtractDiagnostics);

void BM_ParsePatch(benchmark::State& state) {
    std::string diff;
    for (int f = 0; f < 4; ++f) {
        diff += "diff --git a/f" + std::to_string(f) + ".cpp b/f" + std::to_string(f) + ".cpp\n";
        diff += "--- a/f" + std::to_string(f) + ".cpp\n+++ b/f" + std::to_string(f) + ".cpp\n";
        diff += "@@ -10,7 +10,8 @@\n";
        for (int l = 0; l < 3; ++l) diff += " context line " + std::to_string(l) + "\n";
        diff += "-removed line\n+added line\n+another added line\n";
        for (int l = 3; l < 6; ++l) diff += " context line " + std::to_string(l) + "\n";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_patch(diff));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(diff.size()));
}
BENCHMARK(BM_ParsePatch);

// Full pipeline over a small generated corpus, excluding generation cost.
void BM_AnalyzeCorpus(benchmark::State& state) {
    fs::path dir = fs::temp_directory_path() / "sj_bench_corpus";
    fs::remove_all(dir);
    ScenarioSpec spec = ScenarioSpec::defaults();
    spec.n_series = static_cast<int>(state.range(0));
    spec.seed = 12345;
    generate(spec, dir);

    for (auto _ : state) {
        CorpusStore store = ingest(dir);
        LinkResult link = build_series(store);
        benchmark::DoNotOptimize(compute_resolutions(link.series, store));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    fs::remove_all(dir);
}
BENCHMARK(BM_AnalyzeCorpus)->Arg(100)->Arg(500);

} // namespace

BENCHMARK_MAIN();
