#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shadowjob {

enum class CompileStatus { Pass, Fail };

/// One CI invocation as recorded in builds.jsonl.
struct BuildRecord {
    std::string build_id;
    std::string change_id;
    std::string patch_id;
    std::int64_t start_time = 0; // UTC epoch seconds
    CompileStatus compile_status = CompileStatus::Pass;
    std::string log_ref; // relative path; may be empty for passing builds

    friend bool operator==(const BuildRecord&, const BuildRecord&) = default;
};

enum class LineOp { Context, Add, Del };

struct HunkLine {
    LineOp op = LineOp::Context;
    std::string text;

    friend bool operator==(const HunkLine&, const HunkLine&) = default;
};

struct Hunk {
    int old_start = 1;
    int old_count = 0;
    int new_start = 1;
    int new_count = 0;
    std::vector<HunkLine> lines;

    friend bool operator==(const Hunk&, const Hunk&) = default;
};

enum class ChangeKind { Text, Binary, ModeOnly };

struct FileChange {
    std::string path; // repo-relative
    ChangeKind kind = ChangeKind::Text;
    std::vector<Hunk> hunks; // empty unless kind == Text

    friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct Patch {
    std::string patch_id;
    std::vector<FileChange> file_changes;

    const FileChange* find_file(std::string_view path) const;

    friend bool operator==(const Patch&, const Patch&) = default;
};

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PatchParseError : public std::runtime_error {
public:
    PatchParseError(std::size_t byte_offset, const std::string& what);
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_ = 0;
};

/// Parses a git-style unified diff, possibly multi-file. Binary stanzas
/// yield ChangeKind::Binary, pure mode changes ChangeKind::ModeOnly.
/// Malformed hunk headers and hunk count mismatches raise PatchParseError
/// carrying the byte offset of the offending header. patch_id is left empty.
Patch parse_patch(std::string_view diff_text);

/// Renders a Patch back to unified diff text (inverse of parse_patch).
std::string render_patch(const Patch& patch);

/// Immutable corpus loaded by ingest(). Builds are ordered by
/// (change_id, start_time, build_id); logs are retained for failing
/// builds only.
class CorpusStore {
public:
    const std::vector<BuildRecord>& builds() const { return builds_; }
    const std::map<std::string, Patch>& patches() const { return patches_; }

    std::span<const BuildRecord> builds_for_change(std::string_view change_id) const;
    std::vector<std::string_view> change_ids() const;

    const Patch* find_patch(const std::string& patch_id) const;
    const std::string* log_for(const std::string& build_id) const;

    std::size_t build_count() const { return builds_.size(); }
    std::size_t patch_count() const { return patches_.size(); }
    std::size_t log_count() const { return logs_.size(); }

    /// Content fingerprint of the ingested inputs, computed over the
    /// canonically ordered build records plus the raw patch and log bytes.
    /// Invariant under reordering of builds.jsonl lines.
    const std::string& content_digest() const { return digest_; }

private:
    friend CorpusStore ingest(const std::filesystem::path&, int);

    std::vector<BuildRecord> builds_;
    std::map<std::string, Patch> patches_;
    std::map<std::string, std::string> logs_; // build_id -> raw log text
    std::string digest_;
};

/// Loads a corpus directory (builds.jsonl + logs/ + patches/) into an
/// immutable store. Log and patch files are read with up to `max_threads`
/// workers (0 = one per hardware thread); the result does not depend on
/// the thread count.
///
/// Throws IngestError on unparseable metadata lines (naming the line
/// number), on missing fields, and on dangling patch or log references
/// (naming the build_id).
CorpusStore ingest(const std::filesystem::path& corpus_root, int max_threads = 0);

} // namespace shadowjob
