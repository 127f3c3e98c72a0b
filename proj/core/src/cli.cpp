#include <shadowjob/cli.hpp>

#include <shadowjob/classify.hpp>
#include <shadowjob/corpus.hpp>
#include <shadowjob/link.hpp>
#include <shadowjob/metrics.hpp>
#include <shadowjob/report.hpp>
#include <shadowjob/simulate.hpp>
#include <shadowjob/version.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace shadowjob {

namespace {

int env_thread_cap() {
    const char* v = std::getenv("SHADOWJOB_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (end == nullptr || *end != '\0' || n < 0) return 0;
    return static_cast<int>(n);
}

int run_analyze(const std::string& input_dir, const std::string& out_dir, int top_k,
                bool normalize_time) {
    CorpusStore store;
    try {
        store = ingest(input_dir, env_thread_cap());
    } catch (const IngestError& e) {
        std::cerr << "analyze: " << e.what() << "\n";
        return 1;
    }
    if (store.builds().empty()) {
        std::cerr << "analyze: no builds found in " << input_dir << "\n";
        return 1;
    }

    LinkResult link = build_series(store);
    std::vector<ResolutionRecord> records = compute_resolutions(link.series, store);

    ReportOptions options;
    options.top_k = top_k;
    options.normalize_time = normalize_time;
    AnalysisReport rep = render_report(records, link, store, options, out_dir);

    std::cerr << "analyze: " << store.build_count() << " builds, " << link.series.size()
              << " failure series, " << records.size() << " records -> " << out_dir << "\n";
    if (rep.empty_input) {
        std::cerr << "analyze: warning: no resolution records; report has zeroed sections\n";
    }
    return 0;
}

int run_ingest_check(const std::string& input_dir) {
    CorpusStore store;
    try {
        store = ingest(input_dir, env_thread_cap());
    } catch (const IngestError& e) {
        std::cerr << "ingest-check: " << e.what() << "\n";
        return 1;
    }
    std::size_t fails = 0;
    for (const BuildRecord& b : store.builds()) {
        if (b.compile_status == CompileStatus::Fail) ++fails;
    }
    std::cout << "builds: " << store.build_count() << "\n"
              << "changes: " << store.change_ids().size() << "\n"
              << "patches: " << store.patch_count() << "\n"
              << "failing builds: " << fails << "\n"
              << "failure logs: " << store.log_count() << "\n"
              << "corpus digest: " << store.content_digest() << "\n";
    return 0;
}

int run_classify(const std::string& message) {
    ErrorType type = classify_message(normalize_message(message));
    std::cout << to_string(type) << " " << to_string(class_of(type)) << "\n";
    return 0;
}

int run_simulate(const std::string& spec_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    ScenarioSpec spec;
    try {
        spec = spec_path.empty() ? ScenarioSpec::defaults()
                                 : ScenarioSpec::from_json_file(spec_path);
        if (seed.has_value()) spec.seed = *seed;
        spec.validate();
        GroundTruthManifest manifest = generate(spec, out_dir);
        std::cerr << "simulate: " << manifest.rows.size() << " series -> " << out_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_report(const std::string& taxonomy_path) {
    std::string csv = taxonomy_csv();
    if (taxonomy_path.empty() || taxonomy_path == "-") {
        std::cout << csv;
        return 0;
    }
    std::ofstream out(taxonomy_path, std::ios::binary);
    if (!out) {
        std::cerr << "report: cannot write " << taxonomy_path << "\n";
        return 1;
    }
    out << csv;
    return 0;
}

} // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"CI build-diagnostics toolkit: mines build histories for "
                 "compilation errors, classifies them, links failures to fixing "
                 "patches, and reports resolution time/size/distance statistics.",
                 kToolName};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Run the full pipeline over a corpus "
                                                  "directory and write report files");
    std::string an_input, an_out;
    int an_top_k = 4;
    bool an_normalize = false;
    analyze->add_option("--input", an_input, "Corpus directory (builds.jsonl, logs/, patches/)")
        ->required();
    analyze->add_option("--out", an_out, "Output directory for report.json and CSV files")
        ->required();
    analyze->add_option("--top-k", an_top_k, "Error types in the correlation table")
        ->default_val(4);
    analyze->add_flag("--normalize-time", an_normalize,
                      "Report min-max normalized resolution times instead of seconds");

    // ingest-check
    auto* check = app.add_subcommand("ingest-check", "Validate a corpus directory and "
                                                     "print its counts");
    std::string ic_input;
    check->add_option("--input", ic_input, "Corpus directory")->required();

    // classify
    auto* cls = app.add_subcommand("classify", "Classify one compiler error message");
    std::string cls_message;
    cls->add_option("--message", cls_message, "Raw error message text")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus with a "
                                               "ground-truth manifest");
    std::string sim_spec, sim_out;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--spec", sim_spec, "Scenario spec JSON file (defaults when omitted)");
    sim->add_option("--out", sim_out, "Output corpus directory")->required();
    sim->add_option("--seed", sim_seed, "Override the scenario seed");

    // report
    auto* rep = app.add_subcommand("report", "Emit reference data for consumers");
    std::string rep_taxonomy = "-";
    rep->add_option("--taxonomy", rep_taxonomy,
                    "Write the type/fragment/class taxonomy CSV to a file ('-' = stdout)")
        ->expected(0, 1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // help goes to stdout, exit 0
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n";
        std::cerr << app.help() << "\n";
        return 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(an_input, an_out, an_top_k, an_normalize);
        if (check->parsed()) return run_ingest_check(ic_input);
        if (cls->parsed()) return run_classify(cls_message);
        if (sim->parsed()) return run_simulate(sim_spec, sim_out, sim_seed);
        if (rep->parsed()) return run_report(rep_taxonomy);
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int cli_run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_run(args);
}

} // namespace shadowjob
