// accent: command-line front end for the accent adaptation model.
//
// Exit codes:
//   0  success, every requested artifact written
//   1  data error (unreadable file, bad transcription, schema mismatch, ...)
//   2  usage error (bad flags, missing arguments)

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accent/accent.hpp"

#ifndef ACCENT_DEFAULT_DATA_DIR
#define ACCENT_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace accent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string data_dir = ACCENT_DEFAULT_DATA_DIR;
    std::string symbols;
    std::vector<std::string> lexicons;
    std::vector<std::string> transcripts;
    std::string params_in;
    std::string params_out;
    std::string reference;
    std::string out_dir;
    NaiveSettings constants;
    std::size_t jobs = 1;

    std::string data(const std::string& rel) const { return (fs::path(data_dir) / rel).string(); }

    std::string symbols_path() const { return symbols.empty() ? data("symbols.tsv") : symbols; }

    std::vector<std::string> lexicon_paths() const {
        if (!lexicons.empty()) return lexicons;
        return {data("lexicon/paragraph.tsv"), data("lexicon/distractors.tsv")};
    }

    std::vector<std::string> transcript_inputs() const {
        if (!transcripts.empty()) return transcripts;
        return {data("speakers/A"), data("speakers/B")};
    }

    std::string output_dir() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env = std::getenv("ACCENT_OUT_DIR"); env && *env) return env;
        return "accent-out";
    }
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string join_upper(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) out += (out.empty() ? "" : " | ") + upper(w);
    return out.empty() ? "-" : out;
}

ModelParams initial_params(const RunConfig& cfg, const Lexicon& lexicon) {
    if (!cfg.params_in.empty()) return load_params(cfg.params_in);
    return init_naive_params(lexicon.inventory(), cfg.constants);
}

void emit_params(const RunConfig& cfg, const ModelParams& params) {
    if (cfg.params_out.empty() || cfg.params_out == "-")
        std::cout << dump_params(params);
    else
        save_params(params, cfg.params_out);
}

// ---------------------------------------------------------------------------

int cmd_encode(const RunConfig& cfg, const std::vector<std::string>& words) {
    if (words.empty()) throw UsageError("encode needs at least one transcription");
    const auto symbols = SymbolTable::load(cfg.symbols_path());
    for (const auto& w : words) {
        if (detail::trim_word(w).empty()) throw UsageError("empty transcription");
        const auto phones = parse_word_transcription(w, symbols);
        std::cout << w << "\t" << phones.size() << "\n";
        for (const auto& v : phones)
            std::cout << "  " << v.to_string() << "\t" << symbols.describe(v) << "\n";
    }
    return kExitOk;
}

int cmd_recognize(const RunConfig& cfg, const std::vector<std::string>& words, std::size_t top) {
    if (words.empty()) throw UsageError("recognize needs at least one transcription");
    const auto symbols = SymbolTable::load(cfg.symbols_path());
    const auto lexicon = load_lexicon(cfg.lexicon_paths(), symbols);
    const Recognizer recognizer(lexicon, initial_params(cfg, lexicon), cfg.jobs);
    for (const auto& w : words) {
        const auto r = recognizer.recognize(parse_word_transcription(w, symbols));
        std::cout << w << "\t" << join_upper(r.tie_set) << "\n";
        for (std::size_t i = 0; i < std::min(top, r.ranking.size()); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", r.ranking[i].log_probability);
            std::cout << "  " << r.ranking[i].word << "\t" << buf << "\n";
        }
    }
    return kExitOk;
}

int cmd_adapt(const RunConfig& cfg, bool all_words) {
    const auto symbols = SymbolTable::load(cfg.symbols_path());
    const auto lexicon = load_lexicon(cfg.lexicon_paths(), symbols);
    std::vector<TrainingPair> pairs;
    for (const auto& path : collect_transcripts(cfg.transcript_inputs())) {
        const auto t = load_transcript(path, symbols);
        auto split = split_transcript(t, lexicon);
        pairs.insert(pairs.end(), split.train.begin(), split.train.end());
        if (all_words) pairs.insert(pairs.end(), split.test.begin(), split.test.end());
    }
    emit_params(cfg, adapt(initial_params(cfg, lexicon), pairs, cfg.jobs));
    return kExitOk;
}

std::string speaker_report(const SpeakerEvaluation& ev, const SymbolTable& symbols) {
    std::ostringstream out;
    out << "speaker " << ev.id << " (group " << (ev.group.empty() ? "-" : ev.group) << ")\n";
    for (const EvalReport* r : {&ev.before, &ev.after}) {
        out << "\n" << (r == &ev.before ? "before learning" : "after learning") << ": rate "
            << format_rate(r->rate) << " (" << r->correct << "/" << r->items.size() << ")\n";
        for (const auto& item : r->items)
            out << "  " << (item.correct ? "  " : "x ") << item.target << "\t"
                << join_upper(item.tie_set) << "\n";
    }
    out << "\ntransformations on the training words (model counts, identities omitted)\n";
    for (const auto& [key, n] : ev.counts.n_v_prod)
        if (key.first != key.second)
            out << "  " << symbols.describe(key.first) << " -> " << symbols.describe(key.second)
                << "\t" << n << "\n";
    for (const auto& [p, n] : ev.counts.n_del)
        out << "  " << symbols.describe(p) << " -> -\t" << n << "\n";
    for (const auto& [v, n] : ev.counts.n_v_ins)
        out << "  - -> " << symbols.describe(v) << "\t" << n << "\n";
    return out.str();
}

std::string diff_report(const TransformationDiff& diff) {
    std::ostringstream out;
    out << "native\tforeign\treference\tmodel\tmatch\n";
    auto cell = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
    for (const auto& r : diff.rows)
        out << cell(r.native_text) << "\t" << cell(r.foreign_text) << "\t" << *r.reference << "\t"
            << r.model << "\t" << (r.match ? "yes" : "NO") << "\n";
    for (const auto& r : diff.unlisted)
        out << cell(r.native_text) << "\t" << cell(r.foreign_text) << "\t-\t" << r.model
            << "\tunlisted\n";
    return out.str();
}

std::string anova_block(const AnovaResult& a) {
    std::ostringstream out;
    char buf[160];
    auto line = [&](const char* name, const AnovaEffect& e) {
        std::snprintf(buf, sizeof buf, "  %-12s SS %10.4f  F(%g,%g) = %8.4f  p = %.6g\n", name,
                      e.sum_of_squares, e.df, a.error_df, e.f, e.p);
        out << buf;
    };
    line("learning", a.condition);
    line("group", a.group);
    line("interaction", a.interaction);
    std::snprintf(buf, sizeof buf, "  %-12s SS %10.4f  df %g\n", "error", a.error_ss, a.error_df);
    out << buf;
    return out.str();
}

std::string summary_report(const std::vector<SpeakerRates>& rates) {
    std::ostringstream out;
    out << "speakers: " << rates.size() << "\n\n";
    char buf[160];
    out << "group  n   before (mean +- se)    after (mean +- se)     gain\n";
    for (const auto& g : group_report(rates)) {
        std::snprintf(buf, sizeof buf, "%-5s %2zu   %8.4f +- %7.4f   %8.4f +- %7.4f   %+8.4f\n",
                      g.group.c_str(), g.speakers, g.mean_before, g.se_before, g.mean_after,
                      g.se_after, g.mean_after - g.mean_before);
        out << buf;
    }
    std::size_t a = 0, b = 0;
    for (const auto& r : rates) {
        if (r.group == "A") ++a;
        if (r.group == "B") ++b;
    }
    out << "\ntwo-way ANOVA (group x learning)\n";
    if (const auto table = rate_table(rates, "A", "B")) {
        out << anova_block(two_way_anova(*table));
    } else if (a >= 2 && b >= 2) {
        const std::size_t n = std::min(a, b);
        std::vector<SpeakerRates> subset;
        std::size_t ka = 0, kb = 0;
        for (const auto& r : rates) {
            if (r.group == "A" && ka < n) ++ka, subset.push_back(r);
            if (r.group == "B" && kb < n) ++kb, subset.push_back(r);
        }
        out << "  design is unbalanced (A " << a << ", B " << b << "); informational result on the first "
            << n << " speakers of each group:\n"
            << anova_block(two_way_anova(*rate_table(subset, "A", "B")));
    } else {
        out << "  not computed: needs groups A and B with at least two speakers each\n";
    }
    return out.str();
}

/// Reference table for one speaker. Without --reference the bundled
/// <speaker>.transformations.tsv is used when present. An explicit file
/// applies when it is named after the speaker or only one speaker is run.
std::optional<fs::path> reference_for(const RunConfig& cfg, const std::string& id,
                                      std::size_t speakers) {
    const std::string name = id + ".transformations.tsv";
    if (cfg.reference.empty()) {
        const fs::path p = fs::path(cfg.data("reference")) / name;
        return fs::is_regular_file(p) ? std::optional(p) : std::nullopt;
    }
    const fs::path given(cfg.reference);
    if (fs::is_directory(given)) {
        const fs::path p = given / name;
        return fs::is_regular_file(p) ? std::optional(p) : std::nullopt;
    }
    if (!fs::is_regular_file(given)) throw IoError("cannot open reference table '" + cfg.reference + "'");
    const auto stem = given.filename().string();
    if (speakers == 1 || stem.substr(0, stem.find('.')) == id) return given;
    return std::nullopt;
}

int cmd_evaluate(const RunConfig& cfg) {
    const auto symbols = SymbolTable::load(cfg.symbols_path());
    const auto lexicon = load_lexicon(cfg.lexicon_paths(), symbols);
    const auto initial = initial_params(cfg, lexicon);
    const auto paths = collect_transcripts(cfg.transcript_inputs());
    if (paths.empty()) throw UsageError("no transcripts found");

    std::vector<SpeakerTranscript> transcripts;
    for (const auto& p : paths) transcripts.push_back(load_transcript(p, symbols));

    std::vector<SpeakerEvaluation> evals(transcripts.size());
    parallel_for(transcripts.size(), cfg.jobs,
                 [&](std::size_t i) { evals[i] = evaluate_speaker(transcripts[i], lexicon, initial, 1); });

    const fs::path out_dir = cfg.output_dir();
    std::vector<SpeakerRates> rates;
    bool all_match = true;
    for (const auto& ev : evals) {
        write_file(out_dir / "speakers" / (ev.id + ".txt"), speaker_report(ev, symbols));
        rates.push_back({ev.id, ev.group, ev.before.rate, ev.after.rate});

        if (const auto ref = reference_for(cfg, ev.id, evals.size())) {
            const auto diff = transformation_table(ev.counts, load_reference_table(ref->string(), symbols), &symbols);
            all_match = all_match && diff.all_match();
            write_file(out_dir / "transformations" / (ev.id + ".tsv"), diff_report(diff));
        }
    }
    write_file(out_dir / "rates.csv", rates_csv(rates));
    write_file(out_dir / "summary.txt", summary_report(rates));

    for (const auto& r : rates)
        std::cout << r.id << "\t" << (r.group.empty() ? "-" : r.group) << "\tbefore "
                  << format_rate(r.before) << "\tafter " << format_rate(r.after) << "\n";
    std::cout << "reports written to " << out_dir.string() << "\n";
    if (!all_match) std::cout << "note: some transformation counts differ from the reference\n";
    return kExitOk;
}

int cmd_params_dump(const RunConfig& cfg) {
    const auto symbols = SymbolTable::load(cfg.symbols_path());
    const auto lexicon = load_lexicon(cfg.lexicon_paths(), symbols);
    emit_params(cfg, initial_params(cfg, lexicon));
    return kExitOk;
}

int cmd_params_load(const RunConfig& cfg) {
    if (cfg.params_in.empty()) throw UsageError("params load needs --params-in");
    const auto params = load_params(cfg.params_in);
    if (const auto problem = check_invariants(params); !problem.empty())
        throw SchemaMismatch("snapshot violates a parameter invariant: " + problem);
    std::cerr << "loaded " << params.emit.size() << " phonemes, p_ins " << params.p_ins << "\n";
    if (!cfg.params_out.empty()) emit_params(cfg, params);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foreign-accent adaptation model: encode, recognize, adapt, evaluate"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a TOML/INI file; flags override it");

    RunConfig cfg;
    app.add_option("--data-dir", cfg.data_dir, "Directory holding the bundled corpus")
        ->capture_default_str();
    app.add_option("--symbols", cfg.symbols, "Symbol table (default: <data-dir>/symbols.tsv)");
    app.add_option("--lexicon", cfg.lexicons,
                   "Dictionary file; repeat to merge several (default: paragraph + distractors)");
    app.add_option("--transcripts", cfg.transcripts,
                   "Speaker transcript files or directories of *.tsv (default: bundled speakers)");
    app.add_option("--params-in", cfg.params_in, "Start from this parameter snapshot");
    app.add_option("--params-out", cfg.params_out, "Write the resulting parameter snapshot here ('-' = stdout)");
    app.add_option("--reference", cfg.reference,
                   "Reference transformation table, or a directory of <speaker>.transformations.tsv");
    app.add_option("--out-dir", cfg.out_dir, "Report directory (env ACCENT_OUT_DIR; default accent-out)");
    app.add_option("--p-ins", cfg.constants.p_ins, "Initial insertion probability")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app.add_option("--p-del", cfg.constants.p_del, "Initial deletion probability given no insertion")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app.add_option("--sigma", cfg.constants.sigma, "Width of the initial emission bell curve")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--prior-weight", cfg.constants.prior_weight, "Prior weight C of the update rule")
        ->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--jobs", cfg.jobs, "Worker threads (0 = one per core)")->capture_default_str();

    std::vector<std::string> words;
    std::size_t top = 5;
    bool all_words = false;

    auto* encode = app.add_subcommand("encode", "Print the feature vectors of IPA transcriptions");
    encode->add_option("transcription", words, "IPA text of one word each")->required();

    auto* recognize_cmd = app.add_subcommand("recognize", "Recognize words from IPA transcriptions");
    recognize_cmd->add_option("transcription", words, "IPA text of one word each")->required();
    recognize_cmd->add_option("--top", top, "Ranked candidates to print")->capture_default_str();

    auto* adapt_cmd = app.add_subcommand("adapt", "Adapt parameters on speaker transcripts");
    adapt_cmd->add_flag("--all-words", all_words, "Train on all 69 words instead of the first 35");

    auto* evaluate = app.add_subcommand("evaluate", "Before/after recognition on every transcript");

    auto* params = app.add_subcommand("params", "Parameter snapshots");
    params->require_subcommand(1);
    auto* dump = params->add_subcommand("dump", "Write initial (or --params-in) parameters");
    auto* load = params->add_subcommand("load", "Validate a snapshot and optionally re-write it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        cfg.constants.validate();
        if (*encode) return cmd_encode(cfg, words);
        if (*recognize_cmd) return cmd_recognize(cfg, words, top);
        if (*adapt_cmd) return cmd_adapt(cfg, all_words);
        if (*evaluate) return cmd_evaluate(cfg);
        if (*dump) return cmd_params_dump(cfg);
        if (*load) return cmd_params_load(cfg);
    } catch (const UsageError& e) {
        std::cerr << "accent: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "accent: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
