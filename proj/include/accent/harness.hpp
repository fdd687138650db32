#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "accent/adaptation.hpp"
#include "accent/anova.hpp"
#include "accent/error.hpp"
#include "accent/lexicon.hpp"
#include "accent/model_params.hpp"
#include "accent/recognizer.hpp"
#include "accent/symbol_table.hpp"
#include "accent/transcription.hpp"

namespace accent {

inline constexpr std::size_t kTrainingSize = 35;
inline constexpr std::size_t kTestSize = kElicitationParagraph.size() - kTrainingSize;

struct TranscriptEntry {
    std::string word;
    std::string transcription;
    std::vector<PhoneFeatures> phones;
};

/// One speaker's reading of the elicitation paragraph.
struct SpeakerTranscript {
    std::string id;
    std::string group;
    std::vector<TranscriptEntry> entries;
};

/// Checks length and word order against the paragraph.
inline void validate_transcript(const SpeakerTranscript& t) {
    if (t.entries.size() != kElicitationParagraph.size())
        throw MalformedTranscript("transcript '" + t.id + "' has " +
                                  std::to_string(t.entries.size()) + " entries, expected " +
                                  std::to_string(kElicitationParagraph.size()));
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        if (t.entries[i].word != kElicitationParagraph[i])
            throw MalformedTranscript("transcript '" + t.id + "' entry " + std::to_string(i + 1) +
                                      " is '" + t.entries[i].word + "', expected '" +
                                      std::string(kElicitationParagraph[i]) + "'");
}

/// Reads "word<TAB>IPA" lines ('#' comments) into a validated transcript.
inline SpeakerTranscript read_transcript(std::istream& in, const SymbolTable& symbols,
                                         std::string id, std::string group = {}) {
    SpeakerTranscript t{std::move(id), std::move(group), {}};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tab = line.find('\t');
        const std::string where = t.id + ":" + std::to_string(lineno) + ": ";
        if (tab == std::string::npos) throw MalformedTranscript(where + "expected word<TAB>IPA");
        TranscriptEntry e{normalize_word(line.substr(0, tab)), line.substr(tab + 1), {}};
        try {
            e.phones = parse_word_transcription(e.transcription, symbols);
        } catch (const Error& err) {
            throw MalformedTranscript(where + "word '" + e.word + "': " + err.what());
        }
        t.entries.push_back(std::move(e));
    }
    validate_transcript(t);
    return t;
}

/// Speaker id is the file stem; group is the parent directory name.
inline SpeakerTranscript load_transcript(const std::filesystem::path& path,
                                         const SymbolTable& symbols) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open transcript '" + path.string() + "'");
    return read_transcript(in, symbols, path.stem().string(),
                           path.parent_path().filename().string());
}

/// Expands files and directories (non-recursive, *.tsv) into a sorted list
/// of transcript paths.
inline std::vector<std::filesystem::path> collect_transcripts(
    const std::vector<std::string>& inputs) {
    namespace fs = std::filesystem;
    std::vector<fs::path> out;
    for (const auto& input : inputs) {
        const fs::path p(input);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".tsv")
                    found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw IoError("no such transcript file or directory '" + input + "'");
        }
    }
    return out;
}

struct SplitTranscript {
    std::vector<TrainingPair> train;
    std::vector<TrainingPair> test;
};

/// First 35 tokens train, last 34 test; word forms come from the lexicon.
inline SplitTranscript split_transcript(const SpeakerTranscript& t, const Lexicon& lexicon) {
    validate_transcript(t);
    SplitTranscript out;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        TrainingPair pair{lexicon.at(t.entries[i].word), t.entries[i].phones};
        (i < kTrainingSize ? out.train : out.test).push_back(std::move(pair));
    }
    return out;
}

struct TestOutcome {
    std::string target;
    std::vector<std::string> tie_set;
    bool correct = false;
};

struct EvalReport {
    std::string condition;  // "before" or "after"
    std::vector<TestOutcome> items;
    std::size_t correct = 0;
    double rate = 0.0;
};

/// A test word is correct when it belongs to its tie-set.
inline EvalReport score(const std::vector<TrainingPair>& test,
                        const std::vector<Recognition>& recognitions, std::string condition = {}) {
    if (test.size() != recognitions.size())
        throw Error("score needs one recognition per test item");
    EvalReport r;
    r.condition = std::move(condition);
    for (std::size_t i = 0; i < test.size(); ++i) {
        TestOutcome o{test[i].form.word, recognitions[i].tie_set, false};
        o.correct = recognitions[i].contains(o.target);
        r.correct += o.correct ? 1 : 0;
        r.items.push_back(std::move(o));
    }
    r.rate = test.empty() ? 0.0
                          : 100.0 * static_cast<double>(r.correct) / static_cast<double>(test.size());
    return r;
}

inline EvalReport run_recognition(const std::vector<TrainingPair>& test, const Lexicon& lexicon,
                                  const ModelParams& params, std::string condition,
                                  std::size_t jobs = 1) {
    const Recognizer recognizer(lexicon, params, 1);
    std::vector<Recognition> recognitions(test.size());
    parallel_for(test.size(), jobs,
                 [&](std::size_t i) { recognitions[i] = recognizer.recognize(test[i].obs); });
    return score(test, recognitions, std::move(condition));
}

struct SpeakerEvaluation {
    std::string id;
    std::string group;
    EvalReport before;
    EvalReport after;
    TransformCounts counts;
    std::vector<Alignment> alignments;
    ModelParams adapted;
};

/// Naive recognition of the test words, one adaptation pass on the training
/// words, then recognition again under the adapted parameters.
inline SpeakerEvaluation evaluate_speaker(const SpeakerTranscript& t, const Lexicon& lexicon,
                                          const ModelParams& initial, std::size_t jobs = 1) {
    const auto split = split_transcript(t, lexicon);
    SpeakerEvaluation ev;
    ev.id = t.id;
    ev.group = t.group;
    ev.before = run_recognition(split.test, lexicon, initial, "before", jobs);
    ev.alignments = align_pairs(initial, split.train, jobs);
    ev.counts = accumulate_counts(ev.alignments);
    ev.adapted = update_params(initial, ev.counts);
    ev.after = run_recognition(split.test, lexicon, ev.adapted, "after", jobs);
    return ev;
}

inline SpeakerEvaluation evaluate_speaker(const SpeakerTranscript& t, const Lexicon& lexicon,
                                          const NaiveSettings& settings = {},
                                          std::size_t jobs = 1) {
    return evaluate_speaker(t, lexicon, init_naive_params(lexicon.inventory(), settings), jobs);
}

// ---------------------------------------------------------------------------
// Transformation tables

/// One manual reference row. An empty optional stands for "nothing": no
/// native phoneme (insertion) or no foreign phone (deletion).
struct ReferenceRow {
    std::string native_text;
    std::string foreign_text;
    std::optional<Phoneme> native;
    std::optional<PhoneFeatures> foreign;
    long learn_count = 0;
    long test_count = 0;
    long model_count = 0;
};

inline bool is_empty_cell(const std::string& s) {
    const auto t = detail::trim_word(s);
    return t.empty() || t == "-" || t == "\xE2\x88\x85";  // U+2205 EMPTY SET
}

inline PhoneFeatures parse_single_phone(const std::string& text, const SymbolTable& symbols) {
    const auto phones = parse_word_transcription(text, symbols);
    if (phones.size() != 1)
        throw Error("'" + text + "' encodes " + std::to_string(phones.size()) +
                    " vectors, expected 1");
    return phones.front();
}

/// Format: native TAB foreign TAB learn TAB test TAB model, '#' comments.
/// Use "-" or U+2205 for an empty cell.
inline std::vector<ReferenceRow> read_reference_table(std::istream& in, const SymbolTable& symbols,
                                                      const std::string& origin = "<stream>") {
    std::vector<ReferenceRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, '\t');) cells.push_back(cell);
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (cells.size() != 5) throw Error(where + "expected 5 tab-separated fields");
        ReferenceRow row;
        row.native_text = std::string(detail::trim_word(cells[0]));
        row.foreign_text = std::string(detail::trim_word(cells[1]));
        try {
            if (!is_empty_cell(cells[0])) row.native = parse_single_phone(cells[0], symbols);
            if (!is_empty_cell(cells[1])) row.foreign = parse_single_phone(cells[1], symbols);
            row.learn_count = std::stol(cells[2]);
            row.test_count = std::stol(cells[3]);
            row.model_count = std::stol(cells[4]);
        } catch (const std::logic_error& e) {
            throw Error(where + "bad count: " + e.what());
        } catch (const Error& e) {
            throw Error(where + e.what());
        }
        if (!row.native && !row.foreign) throw Error(where + "row has neither phoneme nor phone");
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ReferenceRow> load_reference_table(const std::string& path,
                                                      const SymbolTable& symbols) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reference table '" + path + "'");
    return read_reference_table(in, symbols, path);
}

/// Model count for one transformation.
inline std::size_t transformation_count(const TransformCounts& counts,
                                        const std::optional<Phoneme>& native,
                                        const std::optional<PhoneFeatures>& foreign) {
    if (native && foreign) return counts.prod(*native, *foreign);
    if (native) return counts.del(*native);
    if (foreign) return counts.ins(*foreign);
    return 0;
}

struct TransformationRow {
    std::optional<Phoneme> native;
    std::optional<PhoneFeatures> foreign;
    std::string native_text;
    std::string foreign_text;
    std::optional<long> reference;  // manual model count, when listed
    std::size_t model = 0;
    bool match = false;
};

struct TransformationDiff {
    std::vector<TransformationRow> rows;      // reference rows, in file order
    std::vector<TransformationRow> unlisted;  // non-identity model transformations not listed

    bool all_match() const {
        return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.match; });
    }
};

inline TransformationDiff transformation_table(const TransformCounts& counts,
                                               const std::vector<ReferenceRow>& reference,
                                               const SymbolTable* symbols = nullptr) {
    TransformationDiff diff;
    using Key = std::pair<std::optional<Phoneme>, std::optional<PhoneFeatures>>;
    std::vector<Key> listed;
    for (const auto& ref : reference) {
        TransformationRow row{ref.native, ref.foreign, ref.native_text, ref.foreign_text,
                              ref.model_count, transformation_count(counts, ref.native, ref.foreign),
                              false};
        row.match = static_cast<long>(row.model) == ref.model_count;
        diff.rows.push_back(std::move(row));
        listed.emplace_back(ref.native, ref.foreign);
    }
    auto is_listed = [&](const Key& k) {
        return std::find(listed.begin(), listed.end(), k) != listed.end();
    };
    auto text = [&](const PhoneFeatures& v) { return symbols ? symbols->describe(v) : v.to_string(); };
    auto add_unlisted = [&](const Key& k, std::size_t n) {
        if (n == 0 || is_listed(k)) return;
        diff.unlisted.push_back({k.first, k.second, k.first ? text(*k.first) : "",
                                 k.second ? text(*k.second) : "", std::nullopt, n, false});
    };
    for (const auto& [key, n] : counts.n_v_prod)
        if (key.first != key.second) add_unlisted({key.first, key.second}, n);
    for (const auto& [p, n] : counts.n_del) add_unlisted({p, std::nullopt}, n);
    for (const auto& [v, n] : counts.n_v_ins) add_unlisted({std::nullopt, v}, n);
    return diff;
}

// ---------------------------------------------------------------------------
// Aggregation

struct GroupSummary {
    std::string group;
    std::size_t speakers = 0;
    double mean_before = 0.0;
    double se_before = 0.0;
    double mean_after = 0.0;
    double se_after = 0.0;
};

struct SpeakerRates {
    std::string id;
    std::string group;
    double before = 0.0;
    double after = 0.0;
};

/// Mean and standard error (sample standard deviation over sqrt(n)); a
/// single sample has standard error 0.
inline std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

/// Per-group means and standard errors, groups in name order.
inline std::vector<GroupSummary> group_report(const std::vector<SpeakerRates>& speakers) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
    for (const auto& s : speakers) {
        if (s.group.empty()) throw Error("speaker '" + s.id + "' has no group label");
        by_group[s.group].first.push_back(s.before);
        by_group[s.group].second.push_back(s.after);
    }
    std::vector<GroupSummary> out;
    for (const auto& [g, rates] : by_group) {
        GroupSummary sum{g, rates.first.size()};
        std::tie(sum.mean_before, sum.se_before) = mean_and_se(rates.first);
        std::tie(sum.mean_after, sum.se_after) = mean_and_se(rates.second);
        out.push_back(sum);
    }
    return out;
}

/// Rate table for the two named groups, or nullopt when the design is not
/// a balanced 2x2 with at least two speakers per group.
inline std::optional<RateTable> rate_table(const std::vector<SpeakerRates>& speakers,
                                           const std::string& first_group,
                                           const std::string& second_group) {
    RateTable t;
    for (const auto& s : speakers) {
        std::size_t g;
        if (s.group == first_group) g = 0;
        else if (s.group == second_group) g = 1;
        else continue;
        t[g][0].push_back(s.before);
        t[g][1].push_back(s.after);
    }
    if (t[0][0].size() < 2 || t[0][0].size() != t[1][0].size()) return std::nullopt;
    return t;
}

inline std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", rate);
    return buf;
}

/// CSV with header speaker,group,condition,rate; rows in input order.
inline std::string rates_csv(const std::vector<SpeakerRates>& speakers) {
    std::string out = "speaker,group,condition,rate\n";
    for (const auto& s : speakers) {
        out += s.id + "," + s.group + ",before," + format_rate(s.before) + "\n";
        out += s.id + "," + s.group + ",after," + format_rate(s.after) + "\n";
    }
    return out;
}

}  // namespace accent
