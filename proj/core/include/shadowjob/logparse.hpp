#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shadowjob {

/// One compiler error occurrence extracted from a raw build log.
/// `line` is only ever set together with `file`; linker errors and bare
/// driver errors carry neither.
struct Diagnostic {
    std::string build_id;
    std::optional<std::string> file;
    std::optional<int> line;   // >= 1
    std::optional<int> column; // >= 1
    std::string message;       // normalized, nonempty, single-line

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Collapses whitespace runs to single spaces and trims the ends.
/// Text inside single-quoted identifiers is preserved verbatim.
std::string normalize_message(std::string_view raw);

/// Scans a raw build log for compiler error lines. Recognized forms:
///   (a) locational:  <path>:<line>[:<col>]: [fatal ]error: <message>
///   (b) linker:      any line containing "ld returned <n> exit status"
///   (c) bare marker: a line starting with "[fatal ]error: <message>"
/// Lines containing "warning:" never yield a diagnostic. Unmatched lines
/// are skipped. Order and multiplicity of matches are preserved.
std::vector<Diagnostic> extract_diagnostics(std::string_view log_text,
                                            std::string_view build_id);

} // namespace shadowjob
