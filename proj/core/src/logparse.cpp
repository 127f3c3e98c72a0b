#include <shadowjob/logparse.hpp>

#include <cctype>

namespace shadowjob {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

// Parses an all-digit field into a line/column number >= 1.
std::optional<int> parse_coord(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    if (v < 1) return std::nullopt;
    return static_cast<int>(v);
}

// True when the line contains "ld returned <digits> exit status".
bool is_linker_failure(std::string_view line) {
    constexpr std::string_view kHead = "ld returned ";
    constexpr std::string_view kTail = " exit status";
    std::size_t pos = line.find(kHead);
    while (pos != std::string_view::npos) {
        std::size_t digits = pos + kHead.size();
        std::size_t end = digits;
        while (end < line.size() && std::isdigit(static_cast<unsigned char>(line[end]))) ++end;
        if (end > digits && line.substr(end).starts_with(kTail)) return true;
        pos = line.find(kHead, pos + 1);
    }
    return false;
}

// Locates the "error:" / "fatal error:" marker usable for form (a):
// the marker must be preceded by ':' + optional spaces. Returns the byte
// range [prefix_end, message_begin).
struct MarkerPos {
    std::size_t prefix_end;    // end of "path:line[:col]" (the ':' before the marker)
    std::size_t message_begin; // first byte after "error: "
};

std::optional<MarkerPos> find_locational_marker(std::string_view line) {
    constexpr std::string_view kError = "error: ";
    std::size_t pos = line.find(kError);
    while (pos != std::string_view::npos) {
        std::size_t marker_begin = pos;
        // Fold a preceding "fatal " into the marker.
        constexpr std::string_view kFatal = "fatal ";
        if (marker_begin >= kFatal.size() &&
            line.substr(marker_begin - kFatal.size(), kFatal.size()) == kFatal) {
            marker_begin -= kFatal.size();
        }
        std::size_t q = marker_begin;
        while (q > 0 && line[q - 1] == ' ') --q;
        if (q > 0 && line[q - 1] == ':') {
            return MarkerPos{q - 1, pos + kError.size()};
        }
        pos = line.find(kError, pos + 1);
    }
    return std::nullopt;
}

} // namespace

std::string normalize_message(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_quote = false;
    bool pending_space = false;
    for (char c : raw) {
        if (!in_quote && is_ws(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
        if (c == '\'') in_quote = !in_quote;
    }
    return out;
}

std::vector<Diagnostic> extract_diagnostics(std::string_view log_text,
                                            std::string_view build_id) {
    std::vector<Diagnostic> out;

    std::size_t pos = 0;
    while (pos <= log_text.size()) {
        std::size_t eol = log_text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? log_text.substr(pos)
                                    : log_text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? log_text.size() + 1 : eol + 1;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        // Errors only; anything carrying a warning marker is skipped.
        if (line.find("warning:") != std::string_view::npos) continue;

        Diagnostic d;
        d.build_id = std::string(build_id);

        // (a) locational form: <path>:<line>[:<col>]: [fatal ]error: <msg>
        if (auto marker = find_locational_marker(line)) {
            std::string_view prefix = line.substr(0, marker->prefix_end);
            std::string_view msg = line.substr(marker->message_begin);

            // Split "path:line[:col]" from the right.
            std::size_t c2 = prefix.rfind(':');
            if (c2 != std::string_view::npos && c2 > 0) {
                std::string_view last = prefix.substr(c2 + 1);
                std::string_view rest = prefix.substr(0, c2);
                std::size_t c1 = rest.rfind(':');
                std::optional<int> lineno, col;
                std::string_view path;
                if (auto v = parse_coord(last)) {
                    // Try path:line:col first.
                    if (c1 != std::string_view::npos && c1 > 0) {
                        if (auto w = parse_coord(rest.substr(c1 + 1))) {
                            path = rest.substr(0, c1);
                            lineno = w;
                            col = v;
                        }
                    }
                    if (!lineno) {
                        path = rest;
                        lineno = v;
                    }
                }
                if (lineno && !trim(path).empty()) {
                    std::string message = normalize_message(msg);
                    if (!message.empty()) {
                        d.file = std::string(trim(path));
                        d.line = lineno;
                        d.column = col;
                        d.message = std::move(message);
                        out.push_back(std::move(d));
                        continue;
                    }
                }
            }
        }

        // (b) linker form: "... ld returned <n> exit status".
        if (is_linker_failure(line)) {
            constexpr std::string_view kError = "error: ";
            std::size_t e = line.find(kError);
            std::string_view msg = (e != std::string_view::npos)
                                       ? line.substr(e + kError.size())
                                       : line;
            std::string message = normalize_message(msg);
            if (!message.empty()) {
                d.message = std::move(message);
                out.push_back(std::move(d));
            }
            continue;
        }

        // (c) bare marker: line starting with "[fatal ]error: ".
        std::string_view t = trim(line);
        if (t.starts_with("fatal error: ") || t.starts_with("error: ")) {
            std::string_view msg = t.substr(t.find("error: ") + 7);
            std::string message = normalize_message(msg);
            if (!message.empty()) {
                d.message = std::move(message);
                out.push_back(std::move(d));
            }
            continue;
        }
    }
    return out;
}

} // namespace shadowjob
