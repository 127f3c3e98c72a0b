#include <doctest.h>

#include <shadowjob/metrics.hpp>

#include "test_support.hpp"

#include <random>

using namespace shadowjob;

namespace {

FailureSeries series_at(std::int64_t last_fail, std::int64_t fix) {
    FailureSeries s;
    s.change_id = "c1";
    BuildRecord f;
    f.build_id = "bf";
    f.change_id = "c1";
    f.start_time = last_fail;
    f.compile_status = CompileStatus::Fail;
    s.failing_builds.push_back(f);
    BuildRecord p;
    p.build_id = "bp";
    p.change_id = "c1";
    p.start_time = fix;
    p.compile_status = CompileStatus::Pass;
    s.fixing_build = p;
    return s;
}

Patch patch_of(const std::string& diff) { return parse_patch(diff); }

} // namespace

// ---------------------------------------------------------------------------
// resolution_time
// ---------------------------------------------------------------------------

TEST_CASE("resolution time runs from the last failure to the fix") {
    FailureSeries s = series_at(5, 12);
    BuildRecord earlier;
    earlier.build_id = "b0";
    earlier.start_time = 0;
    earlier.compile_status = CompileStatus::Fail;
    s.failing_builds.insert(s.failing_builds.begin(), earlier);
    CHECK(resolution_time(s) == 7); // 12 - 5, not 12 - 0
}

TEST_CASE("same-second failure and fix give zero") {
    CHECK(resolution_time(series_at(100, 100)) == 0);
}

TEST_CASE("negative spans are a corpus-ordering violation") {
    CHECK_THROWS_AS(resolution_time(series_at(100, 50)), std::logic_error);
}

// ---------------------------------------------------------------------------
// fix_line_numbers
// ---------------------------------------------------------------------------

TEST_CASE("deleted lines report their old coordinates") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -28,7 +28,5 @@\n"
        " ctx28\n"
        " ctx29\n"
        "-del30\n"
        "-del31\n"
        " ctx32\n"
        " ctx33\n"
        " ctx34\n");
    CHECK(fix_line_numbers(p, "a.cpp") == std::vector<int>{30, 31});
}

TEST_CASE("pure insertion anchors at the first old line after the gap") {
    // Insert two lines between old lines 12 and 13.
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -10,6 +10,8 @@\n"
        " ctx10\n"
        " ctx11\n"
        " ctx12\n"
        "+new_a\n"
        "+new_b\n"
        " ctx13\n"
        " ctx14\n"
        " ctx15\n");
    CHECK(fix_line_numbers(p, "a.cpp") == std::vector<int>{13});

    // The patch-application oracle confirms the adds land after old line 12.
    std::vector<std::string> old_lines;
    for (int i = 1; i <= 20; ++i) old_lines.push_back("ctx" + std::to_string(i));
    auto applied = testutil::apply_file_change(old_lines, p.file_changes[0]);
    REQUIRE(applied.has_value());
    CHECK((*applied)[11] == "ctx12");
    CHECK((*applied)[12] == "new_a");
    CHECK((*applied)[13] == "new_b");
    CHECK((*applied)[14] == "ctx13");
}

TEST_CASE("zero-count old range uses the line after the gap") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -5,0 +6,2 @@\n"
        "+x\n"
        "+y\n");
    CHECK(fix_line_numbers(p, "a.cpp") == std::vector<int>{6});
}

TEST_CASE("insertion at the top of the file clamps to line one") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -0,0 +1,2 @@\n"
        "+x\n"
        "+y\n");
    CHECK(fix_line_numbers(p, "a.cpp") == std::vector<int>{1});
}

TEST_CASE("replacement contributes deleted lines plus the insertion anchor") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -29,3 +29,3 @@\n"
        " ctx29\n"
        "-old30\n"
        "+new30\n"
        " ctx31\n");
    CHECK(fix_line_numbers(p, "a.cpp") == std::vector<int>{30, 31});
}

TEST_CASE("querying a file the patch does not touch yields nothing") {
    Patch p = patch_of(
        "diff --git a/b.cpp b/b.cpp\n"
        "--- a/b.cpp\n"
        "+++ b/b.cpp\n"
        "@@ -1 +1 @@\n"
        "-x\n"
        "+y\n");
    CHECK(fix_line_numbers(p, "a.cpp").empty());
}

TEST_CASE("binary and mode-only changes yield no fix lines") {
    Patch p = patch_of(
        "diff --git a/x.bin b/x.bin\n"
        "Binary files a/x.bin and b/x.bin differ\n"
        "diff --git a/run.sh b/run.sh\n"
        "old mode 100644\n"
        "new mode 100755\n");
    CHECK(fix_line_numbers(p, "x.bin").empty());
    CHECK(fix_line_numbers(p, "run.sh").empty());
}

// ---------------------------------------------------------------------------
// resolution_distance
// ---------------------------------------------------------------------------

TEST_CASE("distance examples") {
    CHECK(resolution_distance(100, {100}) == 0);
    CHECK(resolution_distance(100, {90, 140}) == 10);
    CHECK(resolution_distance(1, {25}) == 24);
}

TEST_CASE("distance rejects an empty fix line list") {
    CHECK_THROWS_AS(resolution_distance(10, {}), std::invalid_argument);
}

TEST_CASE("distance equals a brute-force scan on random instances") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        int error_line = 1 + static_cast<int>(rng() % 10000);
        std::vector<int> fix_lines(1 + rng() % 20);
        for (int& f : fix_lines) f = 1 + static_cast<int>(rng() % 10000);
        CHECK(resolution_distance(error_line, fix_lines) ==
              testutil::min_distance_oracle(error_line, fix_lines));
    }
}

TEST_CASE("distance is translation invariant") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 200; ++i) {
        int error_line = 1 + static_cast<int>(rng() % 1000);
        std::vector<int> fix_lines(1 + rng() % 8);
        for (int& f : fix_lines) f = 1 + static_cast<int>(rng() % 1000);
        int shift = static_cast<int>(rng() % 500);
        std::vector<int> shifted = fix_lines;
        for (int& f : shifted) f += shift;
        CHECK(resolution_distance(error_line, fix_lines) ==
              resolution_distance(error_line + shift, shifted));
    }
}

// ---------------------------------------------------------------------------
// resolution_size
// ---------------------------------------------------------------------------

TEST_CASE("an edit counts the deleted and the added line") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -1,3 +1,3 @@\n"
        " k\n"
        "-old\n"
        "+new\n"
        " k2\n");
    CHECK(resolution_size(p, "a.cpp") == 2);
}

TEST_CASE("single added line has size one") {
    Patch p = patch_of(
        "diff --git a/a.cpp b/a.cpp\n"
        "--- a/a.cpp\n"
        "+++ b/a.cpp\n"
        "@@ -1,2 +1,3 @@\n"
        " k\n"
        "+new\n"
        " k2\n");
    CHECK(resolution_size(p, "a.cpp") == 1);
}

TEST_CASE("binary replacement has size zero") {
    Patch p = patch_of(
        "diff --git a/x.bin b/x.bin\n"
        "Binary files a/x.bin and b/x.bin differ\n");
    CHECK(resolution_size(p, "x.bin") == 0);
}

TEST_CASE("mode-only change has size zero") {
    Patch p = patch_of(
        "diff --git a/run.sh b/run.sh\n"
        "old mode 100644\n"
        "new mode 100755\n");
    CHECK(resolution_size(p, "run.sh") == 0);
}

TEST_CASE("per-file sizes sum to the whole-patch total") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        // Random multi-file patch assembled from rendered text.
        Patch p;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int f = 0; f < n; ++f) {
            FileChange fc;
            fc.path = "f" + std::to_string(f) + ".cpp";
            fc.kind = ChangeKind::Text;
            Hunk h;
            h.old_start = 1;
            int lines = 1 + static_cast<int>(rng() % 7);
            for (int l = 0; l < lines; ++l) {
                int op = static_cast<int>(rng() % 3);
                HunkLine hl;
                hl.text = "t" + std::to_string(l);
                hl.op = op == 0 ? LineOp::Context : op == 1 ? LineOp::Add : LineOp::Del;
                if (hl.op != LineOp::Add) ++h.old_count;
                if (hl.op != LineOp::Del) ++h.new_count;
                h.lines.push_back(hl);
            }
            fc.hunks.push_back(std::move(h));
            p.file_changes.push_back(std::move(fc));
        }
        int sum = 0;
        for (const FileChange& fc : p.file_changes) sum += resolution_size(p, fc.path);
        CHECK(sum == patch_total_size(p));

        auto totals = testutil::scan_diff_totals(render_patch(p));
        CHECK(sum == totals.adds + totals.dels);
    }
}

// ---------------------------------------------------------------------------
// compute_resolutions
// ---------------------------------------------------------------------------

namespace {

// Minimal corpus: one change, fail at t=0, pass at t=9.
void write_corpus_with(const std::filesystem::path& root, const std::string& log_text,
                       const std::string& fix_diff) {
    testutil::write_file(root / "builds.jsonl",
        R"({"build_id":"b1","change_id":"c1","patch_id":"p1","start_time":0,"compile_status":"fail","log_ref":"logs/b1.log"})"
        "\n"
        R"({"build_id":"b2","change_id":"c1","patch_id":"p2","start_time":9,"compile_status":"pass","log_ref":""})"
        "\n");
    testutil::write_file(root / "logs/b1.log", log_text);
    testutil::write_file(root / "patches/p1.diff",
                         "diff --git a/z.cpp b/z.cpp\n--- a/z.cpp\n+++ b/z.cpp\n"
                         "@@ -1 +1 @@\n-x\n+y\n");
    testutil::write_file(root / "patches/p2.diff", fix_diff);
}

} // namespace

TEST_CASE("record joins the diagnostic with per-file size and distance") {
    std::string fix =
        "diff --git a/src/a.cpp b/src/a.cpp\n"
        "--- a/src/a.cpp\n"
        "+++ b/src/a.cpp\n"
        "@@ -38,5 +38,5 @@\n"
        " c38\n"
        " c39\n"
        "-old40\n"
        "+new40\n"
        " c41\n"
        " c42\n";
    testutil::TempDir dir("sj_metrics");
    write_corpus_with(dir.path(),
                      "src/a.cpp:42:7: error: 'x' was not declared in this scope\n", fix);
    CorpusStore store = ingest(dir.path());
    LinkResult link = build_series(store);
    auto records = compute_resolutions(link.series, store);

    REQUIRE(records.size() == 1);
    const ResolutionRecord& r = records[0];
    CHECK(r.resolution_time == 9);
    CHECK(r.resolution_size == 2);
    CHECK(r.fix_lines == std::vector<int>{40, 41});
    REQUIRE(r.resolution_distance.has_value());
    CHECK(*r.resolution_distance == 1); // |41 - 42|
    CHECK_FALSE(r.fix_elsewhere);
}

TEST_CASE("file-less linker error takes the whole-patch size, no distance") {
    std::string fix =
        "diff --git a/m1.cpp b/m1.cpp\n--- a/m1.cpp\n+++ b/m1.cpp\n"
        "@@ -1,2 +1,2 @@\n k\n-o\n+n\n"
        "diff --git a/m2.cpp b/m2.cpp\n--- a/m2.cpp\n+++ b/m2.cpp\n"
        "@@ -1,1 +1,2 @@\n k\n+n\n"
        "diff --git a/m3.cpp b/m3.cpp\n--- a/m3.cpp\n+++ b/m3.cpp\n"
        "@@ -1,2 +1,1 @@\n k\n-o\n";
    testutil::TempDir dir("sj_metrics");
    write_corpus_with(dir.path(), "collect2: error: ld returned 1 exit status\n", fix);
    CorpusStore store = ingest(dir.path());
    auto records = compute_resolutions(build_series(store).series, store);

    REQUIRE(records.size() == 1);
    CHECK(records[0].error.error_type == ErrorType::LdReturned);
    CHECK(records[0].resolution_size == 4); // 2 + 1 + 1
    CHECK_FALSE(records[0].resolution_distance.has_value());
    CHECK(records[0].fix_lines.empty());
}

TEST_CASE("two diagnostics in one series share the resolution time") {
    std::string fix =
        "diff --git a/src/a.cpp b/src/a.cpp\n--- a/src/a.cpp\n+++ b/src/a.cpp\n"
        "@@ -1,2 +1,2 @@\n k\n-o\n+n\n";
    testutil::TempDir dir("sj_metrics");
    write_corpus_with(dir.path(),
                      "src/a.cpp:1:1: error: 'x' was not declared in this scope\n"
                      "src/a.cpp:7:1: error: 'y' does not name a type\n",
                      fix);
    CorpusStore store = ingest(dir.path());
    auto records = compute_resolutions(build_series(store).series, store);

    REQUIRE(records.size() == 2);
    CHECK(records[0].resolution_time == records[1].resolution_time);
    CHECK(records[0].error.error_type == ErrorType::WasNotDeclared);
    CHECK(records[1].error.error_type == ErrorType::DoesNotNameAType);
    // Both diagnostics score against the same fix lines.
    CHECK(records[0].fix_lines == records[1].fix_lines);
}

TEST_CASE("fix in another file is flagged fix-elsewhere with size zero") {
    std::string fix =
        "diff --git a/other.cpp b/other.cpp\n--- a/other.cpp\n+++ b/other.cpp\n"
        "@@ -1,2 +1,2 @@\n k\n-o\n+n\n";
    testutil::TempDir dir("sj_metrics");
    write_corpus_with(dir.path(),
                      "src/a.cpp:3:1: error: 'x' was not declared in this scope\n", fix);
    CorpusStore store = ingest(dir.path());
    auto records = compute_resolutions(build_series(store).series, store);

    REQUIRE(records.size() == 1);
    CHECK(records[0].fix_elsewhere);
    CHECK(records[0].resolution_size == 0);
    CHECK_FALSE(records[0].resolution_distance.has_value());
}

TEST_CASE("diagnostic without a line number gets no distance") {
    // Bare-marker diagnostic carries a message but no file/line.
    std::string fix =
        "diff --git a/src/a.cpp b/src/a.cpp\n--- a/src/a.cpp\n+++ b/src/a.cpp\n"
        "@@ -1,2 +1,2 @@\n k\n-o\n+n\n";
    testutil::TempDir dir("sj_metrics");
    write_corpus_with(dir.path(),
                      "error: cannot convert 'ProductError' to 'const char*'\n", fix);
    CorpusStore store = ingest(dir.path());
    auto records = compute_resolutions(build_series(store).series, store);

    REQUIRE(records.size() == 1);
    CHECK(records[0].error.error_type == ErrorType::CannotConvert);
    CHECK_FALSE(records[0].resolution_distance.has_value());
    CHECK(records[0].resolution_size == 2); // whole patch
}
