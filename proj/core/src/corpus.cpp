#include <shadowjob/corpus.hpp>
#include <shadowjob/report.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace shadowjob {

// ---------------------------------------------------------------------------
// Patch parsing
// ---------------------------------------------------------------------------

PatchParseError::PatchParseError(std::size_t byte_offset, const std::string& what)
    : std::runtime_error("patch parse error at byte " + std::to_string(byte_offset) + ": " + what),
      byte_offset_(byte_offset) {}

const FileChange* Patch::find_file(std::string_view path) const {
    for (const FileChange& fc : file_changes) {
        if (fc.path == path) return &fc;
    }
    return nullptr;
}

namespace {

std::string_view strip_diff_prefix(std::string_view p) {
    if (p.starts_with("a/") || p.starts_with("b/")) return p.substr(2);
    return p;
}

// "--- a/path\t2024-01-01 ..." style timestamps are cut at the tab.
std::string_view trimmed_path(std::string_view p) {
    std::size_t tab = p.find('\t');
    if (tab != std::string_view::npos) p = p.substr(0, tab);
    while (!p.empty() && p.back() == ' ') p.remove_suffix(1);
    return p;
}

bool parse_int_field(std::string_view s, std::size_t& pos, int& out) {
    std::size_t start = pos;
    long v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        v = v * 10 + (s[pos] - '0');
        if (v > 1000000000L) return false;
        ++pos;
    }
    if (pos == start) return false;
    out = static_cast<int>(v);
    return true;
}

// "@@ -old_start[,old_count] +new_start[,new_count] @@..."
bool parse_hunk_header(std::string_view line, Hunk& h) {
    std::size_t pos = 0;
    if (!line.starts_with("@@ -")) return false;
    pos = 4;
    if (!parse_int_field(line, pos, h.old_start)) return false;
    h.old_count = 1;
    if (pos < line.size() && line[pos] == ',') {
        ++pos;
        if (!parse_int_field(line, pos, h.old_count)) return false;
    }
    if (pos + 1 >= line.size() || line[pos] != ' ' || line[pos + 1] != '+') return false;
    pos += 2;
    if (!parse_int_field(line, pos, h.new_start)) return false;
    h.new_count = 1;
    if (pos < line.size() && line[pos] == ',') {
        ++pos;
        if (!parse_int_field(line, pos, h.new_count)) return false;
    }
    return line.substr(pos).starts_with(" @@");
}

struct StanzaState {
    bool active = false;
    std::size_t start_offset = 0;
    std::string a_path;
    std::string b_path;
    std::string rename_to;
    bool is_binary = false;
    bool has_mode_change = false;
    std::vector<Hunk> hunks;
};

} // namespace

Patch parse_patch(std::string_view diff_text) {
    Patch patch;
    StanzaState st;

    Hunk hunk;
    bool in_hunk = false;
    int old_left = 0, new_left = 0;
    std::size_t hunk_offset = 0;

    auto close_hunk = [&]() {
        if (!in_hunk) return;
        if (old_left != 0 || new_left != 0) {
            throw PatchParseError(hunk_offset, "hunk line count mismatch");
        }
        st.hunks.push_back(std::move(hunk));
        hunk = Hunk{};
        in_hunk = false;
    };

    auto flush_stanza = [&]() {
        close_hunk();
        if (!st.active) return;
        FileChange fc;
        if (!st.rename_to.empty()) {
            fc.path = st.rename_to;
        } else if (!st.b_path.empty() && st.b_path != "/dev/null") {
            fc.path = st.b_path;
        } else {
            fc.path = st.a_path;
        }
        if (fc.path.empty()) {
            throw PatchParseError(st.start_offset, "stanza without a usable path");
        }
        if (st.is_binary) {
            fc.kind = ChangeKind::Binary;
        } else if (!st.hunks.empty()) {
            fc.kind = ChangeKind::Text;
            fc.hunks = std::move(st.hunks);
        } else {
            fc.kind = ChangeKind::ModeOnly;
        }
        if (patch.find_file(fc.path) != nullptr) {
            throw PatchParseError(st.start_offset, "duplicate path in patch: " + fc.path);
        }
        patch.file_changes.push_back(std::move(fc));
        st = StanzaState{};
    };

    std::size_t pos = 0;
    while (pos <= diff_text.size()) {
        std::size_t line_offset = pos;
        std::size_t eol = diff_text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? diff_text.substr(pos)
                                    : diff_text.substr(pos, eol - pos);
        bool at_end = (eol == std::string_view::npos);
        pos = at_end ? diff_text.size() + 1 : eol + 1;
        if (at_end && line.empty()) break;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (in_hunk) {
            if (line.empty()) {
                // Tolerate a stripped trailing space on an empty context line.
                if (old_left > 0 && new_left > 0) {
                    hunk.lines.push_back({LineOp::Context, ""});
                    --old_left;
                    --new_left;
                    if (old_left == 0 && new_left == 0) close_hunk();
                    continue;
                }
                close_hunk();
                continue;
            }
            char tag = line.front();
            if (tag == '\\') continue; // "\ No newline at end of file"
            if (tag == ' ' || tag == '+' || tag == '-') {
                LineOp op = (tag == ' ') ? LineOp::Context
                            : (tag == '+') ? LineOp::Add
                                           : LineOp::Del;
                bool uses_old = (op != LineOp::Add);
                bool uses_new = (op != LineOp::Del);
                if ((uses_old && old_left <= 0) || (uses_new && new_left <= 0)) {
                    throw PatchParseError(hunk_offset, "hunk line count mismatch");
                }
                if (uses_old) --old_left;
                if (uses_new) --new_left;
                hunk.lines.push_back({op, std::string(line.substr(1))});
                if (old_left == 0 && new_left == 0) close_hunk();
                continue;
            }
            // Any other tag ends the hunk; counts must have been satisfied.
            close_hunk();
            // fall through to stanza-level handling of this line
        }

        if (line.starts_with("diff --git ")) {
            flush_stanza();
            st.active = true;
            st.start_offset = line_offset;
            std::string_view rest = line.substr(11);
            std::size_t sep = rest.find(" b/");
            if (sep == std::string_view::npos || !rest.starts_with("a/")) {
                throw PatchParseError(line_offset, "malformed diff header");
            }
            st.a_path = std::string(rest.substr(2, sep - 2));
            st.b_path = std::string(rest.substr(sep + 3));
            continue;
        }

        if (!st.active) {
            if (line.starts_with("--- ")) {
                st.active = true;
                st.start_offset = line_offset;
                st.a_path = std::string(strip_diff_prefix(trimmed_path(line.substr(4))));
            }
            continue; // leading noise tolerated
        }

        if (line.starts_with("@@")) {
            Hunk h;
            if (!parse_hunk_header(line, h)) {
                throw PatchParseError(line_offset, "malformed hunk header");
            }
            hunk = std::move(h);
            in_hunk = true;
            hunk_offset = line_offset;
            old_left = hunk.old_count;
            new_left = hunk.new_count;
            if (old_left == 0 && new_left == 0) close_hunk();
            continue;
        }
        if (line.starts_with("--- ")) {
            st.a_path = std::string(strip_diff_prefix(trimmed_path(line.substr(4))));
            continue;
        }
        if (line.starts_with("+++ ")) {
            st.b_path = std::string(strip_diff_prefix(trimmed_path(line.substr(4))));
            continue;
        }
        if (line.starts_with("Binary files ") || line.starts_with("GIT binary patch")) {
            st.is_binary = true;
            continue;
        }
        if (line.starts_with("old mode ") || line.starts_with("new mode ")) {
            st.has_mode_change = true;
            continue;
        }
        if (line.starts_with("rename to ")) {
            st.rename_to = std::string(strip_diff_prefix(line.substr(10)));
            continue;
        }
        // index, similarity, new/deleted file mode, rename from, copy, etc.
    }
    flush_stanza();
    return patch;
}

std::string render_patch(const Patch& patch) {
    std::string out;
    for (const FileChange& fc : patch.file_changes) {
        out += "diff --git a/" + fc.path + " b/" + fc.path + "\n";
        switch (fc.kind) {
        case ChangeKind::ModeOnly:
            out += "old mode 100644\nnew mode 100755\n";
            break;
        case ChangeKind::Binary:
            out += "Binary files a/" + fc.path + " and b/" + fc.path + " differ\n";
            break;
        case ChangeKind::Text: {
            out += "--- a/" + fc.path + "\n+++ b/" + fc.path + "\n";
            for (const Hunk& h : fc.hunks) {
                out += "@@ -" + std::to_string(h.old_start);
                if (h.old_count != 1) out += "," + std::to_string(h.old_count);
                out += " +" + std::to_string(h.new_start);
                if (h.new_count != 1) out += "," + std::to_string(h.new_count);
                out += " @@\n";
                for (const HunkLine& l : h.lines) {
                    char tag = (l.op == LineOp::Context) ? ' '
                               : (l.op == LineOp::Add)   ? '+'
                                                         : '-';
                    out.push_back(tag);
                    out += l.text;
                    out.push_back('\n');
                }
            }
            break;
        }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

std::span<const BuildRecord> CorpusStore::builds_for_change(std::string_view change_id) const {
    auto lo = std::lower_bound(builds_.begin(), builds_.end(), change_id,
                               [](const BuildRecord& b, std::string_view c) {
                                   return b.change_id < c;
                               });
    auto hi = lo;
    while (hi != builds_.end() && hi->change_id == change_id) ++hi;
    if (lo == hi) return {};
    return {&*lo, static_cast<std::size_t>(hi - lo)};
}

std::vector<std::string_view> CorpusStore::change_ids() const {
    std::vector<std::string_view> out;
    for (const BuildRecord& b : builds_) {
        if (out.empty() || out.back() != b.change_id) out.push_back(b.change_id);
    }
    return out;
}

const Patch* CorpusStore::find_patch(const std::string& patch_id) const {
    auto it = patches_.find(patch_id);
    return it == patches_.end() ? nullptr : &it->second;
}

const std::string* CorpusStore::log_for(const std::string& build_id) const {
    auto it = logs_.find(build_id);
    return it == logs_.end() ? nullptr : &it->second;
}

namespace {

std::string read_file_or_throw(const fs::path& path, const std::string& context) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(context + ": cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

int resolve_thread_count(int max_threads) {
    if (max_threads > 0) return max_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers, rethrowing the
// first exception.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    int workers = std::max(threads, 1);
    if (n < static_cast<std::size_t>(workers)) workers = static_cast<int>(n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

CorpusStore ingest(const fs::path& corpus_root, int max_threads) {
    const fs::path builds_path = corpus_root / "builds.jsonl";
    std::ifstream in(builds_path, std::ios::binary);
    if (!in) throw IngestError("no builds found: " + builds_path.string() + " is missing");

    CorpusStore store;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string where = "builds.jsonl:" + std::to_string(line_no);

        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw IngestError(where + ": unparseable metadata line");
        }
        if (!j.contains("build_id") || !j["build_id"].is_string()) {
            throw IngestError(where + ": missing field build_id");
        }
        BuildRecord b;
        b.build_id = j["build_id"].get<std::string>();

        auto need = [&](const char* key) -> const json& {
            if (!j.contains(key)) {
                throw IngestError("build " + b.build_id + ": missing field " + key);
            }
            return j[key];
        };
        const json& cid = need("change_id");
        const json& pid = need("patch_id");
        const json& ts = need("start_time");
        const json& cs = need("compile_status");
        const json& lr = need("log_ref");
        if (!cid.is_string() || !pid.is_string() || !lr.is_string() ||
            !ts.is_number_integer() || !cs.is_string()) {
            throw IngestError("build " + b.build_id + ": malformed field value");
        }
        b.change_id = cid.get<std::string>();
        b.patch_id = pid.get<std::string>();
        b.start_time = ts.get<std::int64_t>();
        b.log_ref = lr.get<std::string>();
        std::string status = cs.get<std::string>();
        if (status == "pass") {
            b.compile_status = CompileStatus::Pass;
        } else if (status == "fail") {
            b.compile_status = CompileStatus::Fail;
        } else {
            throw IngestError("build " + b.build_id + ": invalid compile_status '" + status + "'");
        }
        store.builds_.push_back(std::move(b));
    }

    std::sort(store.builds_.begin(), store.builds_.end(),
              [](const BuildRecord& a, const BuildRecord& b) {
                  if (a.change_id != b.change_id) return a.change_id < b.change_id;
                  if (a.start_time != b.start_time) return a.start_time < b.start_time;
                  return a.build_id < b.build_id;
              });
    for (std::size_t i = 1; i < store.builds_.size(); ++i) {
        if (store.builds_[i].build_id == store.builds_[i - 1].build_id) {
            throw IngestError("build " + store.builds_[i].build_id + ": duplicate build_id");
        }
    }

    // Referenced patch files and failing-build logs, loaded concurrently.
    std::vector<std::string> patch_ids;
    for (const BuildRecord& b : store.builds_) patch_ids.push_back(b.patch_id);
    std::sort(patch_ids.begin(), patch_ids.end());
    patch_ids.erase(std::unique(patch_ids.begin(), patch_ids.end()), patch_ids.end());

    std::vector<const BuildRecord*> failures;
    for (const BuildRecord& b : store.builds_) {
        if (b.compile_status == CompileStatus::Fail) failures.push_back(&b);
    }

    int threads = resolve_thread_count(max_threads);

    std::vector<std::string> patch_texts(patch_ids.size());
    parallel_for(patch_ids.size(), threads, [&](std::size_t i) {
        fs::path p = corpus_root / "patches" / (patch_ids[i] + ".diff");
        if (!fs::exists(p)) {
            // Name one referencing build for the error message.
            for (const BuildRecord& b : store.builds_) {
                if (b.patch_id == patch_ids[i]) {
                    throw IngestError("build " + b.build_id + ": patch '" + patch_ids[i] +
                                      "' not found");
                }
            }
            throw IngestError("patch '" + patch_ids[i] + "' not found");
        }
        patch_texts[i] = read_file_or_throw(p, "patch '" + patch_ids[i] + "'");
    });

    std::vector<std::string> log_texts(failures.size());
    parallel_for(failures.size(), threads, [&](std::size_t i) {
        const BuildRecord& b = *failures[i];
        if (b.log_ref.empty()) {
            throw IngestError("build " + b.build_id + ": failing build without log_ref");
        }
        fs::path p = corpus_root / b.log_ref;
        if (!fs::exists(p)) {
            throw IngestError("build " + b.build_id + ": log '" + b.log_ref + "' not found");
        }
        log_texts[i] = read_file_or_throw(p, "build " + b.build_id);
    });

    for (std::size_t i = 0; i < patch_ids.size(); ++i) {
        try {
            Patch p = parse_patch(patch_texts[i]);
            p.patch_id = patch_ids[i];
            store.patches_.emplace(patch_ids[i], std::move(p));
        } catch (const PatchParseError& e) {
            throw IngestError("patch '" + patch_ids[i] + "': " + e.what());
        }
    }
    for (std::size_t i = 0; i < failures.size(); ++i) {
        store.logs_.emplace(failures[i]->build_id, std::move(log_texts[i]));
    }

    // Content digest over canonical build order + raw patch/log bytes.
    std::uint64_t h = fnv1a64("shadowjob-corpus-v1");
    auto mix = [&h](std::string_view s) {
        h = fnv1a64(s, h);
        h = fnv1a64("\x1e", h);
    };
    for (const BuildRecord& b : store.builds_) {
        mix(b.build_id);
        mix(b.change_id);
        mix(b.patch_id);
        mix(std::to_string(b.start_time));
        mix(b.compile_status == CompileStatus::Fail ? "fail" : "pass");
        mix(b.log_ref);
    }
    for (std::size_t i = 0; i < patch_ids.size(); ++i) {
        mix(patch_ids[i]);
        mix(patch_texts[i]);
    }
    for (const auto& [build_id, text] : store.logs_) {
        mix(build_id);
        mix(text);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    store.digest_ = buf;

    return store;
}

} // namespace shadowjob
