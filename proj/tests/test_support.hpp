#pragma once

// Shared fixtures and independent oracles. Everything here deliberately
// avoids the implementation paths it is used to check.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <shadowjob/corpus.hpp>

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& prefix) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                (prefix + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

// --- Oracles ---------------------------------------------------------------

// Brute-force minimum |fix - error| scan.
inline int min_distance_oracle(int error_line, const std::vector<int>& fix_lines) {
    int best = -1;
    for (int f : fix_lines) {
        int d = f > error_line ? f - error_line : error_line - f;
        if (best < 0 || d < best) best = d;
    }
    return best;
}

// Counts added/deleted lines of a unified diff by raw line scan, excluding
// the ---/+++ file headers.
struct DiffTotals {
    int adds = 0;
    int dels = 0;
};

inline DiffTotals scan_diff_totals(const std::string& diff_text) {
    DiffTotals t;
    std::istringstream in(diff_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("+++", 0) == 0 || line.rfind("---", 0) == 0) continue;
        if (line.rfind("+", 0) == 0) ++t.adds;
        else if (line.rfind("-", 0) == 0) ++t.dels;
    }
    return t;
}

// Applies one file's hunks to the old content, verifying every context and
// deleted line against the file. Returns nullopt on any mismatch.
inline std::optional<std::vector<std::string>> apply_file_change(
    const std::vector<std::string>& old_lines, const shadowjob::FileChange& fc) {
    using shadowjob::LineOp;
    if (fc.kind != shadowjob::ChangeKind::Text) return old_lines;

    std::vector<std::string> out;
    std::size_t cursor = 1; // next old line to copy, 1-based
    for (const shadowjob::Hunk& h : fc.hunks) {
        std::size_t hunk_old = h.old_count > 0 ? static_cast<std::size_t>(h.old_start)
                                               : static_cast<std::size_t>(h.old_start) + 1;
        if (hunk_old < cursor) return std::nullopt; // overlapping hunks
        while (cursor < hunk_old) {
            if (cursor > old_lines.size()) return std::nullopt;
            out.push_back(old_lines[cursor - 1]);
            ++cursor;
        }
        for (const shadowjob::HunkLine& l : h.lines) {
            switch (l.op) {
            case LineOp::Context:
                if (cursor > old_lines.size() || old_lines[cursor - 1] != l.text) {
                    return std::nullopt;
                }
                out.push_back(l.text);
                ++cursor;
                break;
            case LineOp::Del:
                if (cursor > old_lines.size() || old_lines[cursor - 1] != l.text) {
                    return std::nullopt;
                }
                ++cursor;
                break;
            case LineOp::Add:
                out.push_back(l.text);
                break;
            }
        }
    }
    while (cursor <= old_lines.size()) {
        out.push_back(old_lines[cursor - 1]);
        ++cursor;
    }
    return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Literal character-scan whitespace collapse (quote-blind on purpose: inputs
// used with it contain no quoted whitespace).
inline std::string collapse_ws_oracle(const std::string& raw) {
    std::string out;
    bool in_space = true; // swallows leading whitespace
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

} // namespace testutil
