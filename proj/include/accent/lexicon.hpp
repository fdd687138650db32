#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "accent/error.hpp"
#include "accent/phone_features.hpp"
#include "accent/symbol_table.hpp"
#include "accent/transcription.hpp"

namespace accent {

/// The 69-token elicitation paragraph, normalized.
inline constexpr std::array<std::string_view, 69> kElicitationParagraph{
    "please", "call",   "stella",  "ask",    "her",   "to",      "bring",  "these",
    "things", "with",   "her",     "from",   "the",   "store",   "six",    "spoons",
    "of",     "fresh",  "snow",    "peas",   "five",  "thick",   "slabs",  "of",
    "blue",   "cheese", "and",     "maybe",  "a",     "snack",   "for",    "her",
    "brother", "bob",   "we",      "also",   "need",  "a",       "small",  "plastic",
    "snake",  "and",    "a",       "big",    "toy",   "frog",    "for",    "the",
    "kids",   "she",    "can",     "scoop",  "these", "things",  "into",   "three",
    "red",    "bags",   "and",     "we",     "will",  "go",      "meet",   "her",
    "wednesday", "at",  "the",     "train",  "station"};

/// Transcriptions chosen for paragraph words missing from the MRC database.
/// They take precedence over any other transcription of the same word.
inline const std::map<std::string, std::string>& dictionary_overrides() {
    static const std::map<std::string, std::string> overrides{
        {"stella", "stɛllə"}, {"peas", "pi:z"}, {"slabs", "slæbz"}, {"snack", "snæk"},
        {"snake", "sneik"},   {"toy", "tɔɪ"},   {"frog", "fɹɒg"}};
    return overrides;
}

/// Case-folds ASCII letters and strips leading/trailing punctuation.
/// Inner apostrophes survive, so "we'll" and "well" stay distinct.
inline std::string normalize_word(std::string_view word) {
    auto keep = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
    std::size_t b = 0, e = word.size();
    while (b < e && !keep(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && !keep(static_cast<unsigned char>(word[e - 1]))) --e;
    std::string out(word.substr(b, e - b));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

struct WordForm {
    std::string word;
    std::vector<Phoneme> phonemes;
    std::string transcription;

    friend bool operator==(const WordForm&, const WordForm&) = default;
};

using PhonemeInventory = std::set<Phoneme>;

class Lexicon {
public:
    Lexicon() = default;

    /// Adds an entry. Re-adding an identical pronunciation is a no-op;
    /// a conflicting one throws DuplicateWord.
    void add(WordForm form) {
        if (form.phonemes.empty()) throw EmptyWord("word '" + form.word + "' has no phonemes");
        auto [it, inserted] = entries_.try_emplace(form.word, form);
        if (!inserted && it->second.phonemes != form.phonemes)
            throw DuplicateWord("word '" + form.word + "' has conflicting transcriptions '" +
                                it->second.transcription + "' and '" + form.transcription +
                                "'");
    }

    bool contains(std::string_view word) const {
        return entries_.find(std::string(word)) != entries_.end();
    }

    const WordForm& at(std::string_view word) const {
        auto it = entries_.find(std::string(word));
        if (it == entries_.end()) throw MissingWord(std::string(word));
        return it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Entries in word order.
    const std::map<std::string, WordForm>& entries() const noexcept { return entries_; }

    PhonemeInventory inventory() const {
        PhonemeInventory out;
        for (const auto& [w, form] : entries_) out.insert(form.phonemes.begin(), form.phonemes.end());
        return out;
    }

    /// Groups of two or more words with identical phoneme sequences.
    std::vector<std::vector<std::string>> homophone_classes() const {
        std::map<std::vector<Phoneme>, std::vector<std::string>> by_sound;
        for (const auto& [w, form] : entries_) by_sound[form.phonemes].push_back(w);
        std::vector<std::vector<std::string>> out;
        for (auto& [sound, words] : by_sound)
            if (words.size() > 1) out.push_back(std::move(words));
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const Lexicon&, const Lexicon&) = default;

private:
    std::map<std::string, WordForm> entries_;
};

/// Parses one "word<TAB>transcription" record into a WordForm, applying the
/// dictionary overrides.
inline WordForm make_word_form(std::string_view word, std::string_view transcription,
                               const SymbolTable& symbols, bool apply_overrides = true) {
    WordForm form;
    form.word = normalize_word(word);
    if (form.word.empty()) throw BadPhoneme("empty word");
    form.transcription = std::string(transcription);
    if (apply_overrides) {
        const auto& ov = dictionary_overrides();
        if (auto it = ov.find(form.word); it != ov.end()) form.transcription = it->second;
    }
    try {
        form.phonemes = parse_word_transcription(form.transcription, symbols);
    } catch (const UnknownSymbol& e) {
        throw BadPhoneme("word '" + form.word + "': unknown symbol '" + e.symbol() +
                         "' at byte " + std::to_string(e.offset()));
    } catch (const EmptyWord&) {
        throw BadPhoneme("word '" + form.word + "': empty transcription at byte 0");
    }
    return form;
}

/// Reads dictionary records into `lexicon`. Format: UTF-8, one
/// "word<TAB>IPA" record per line, '#' comments.
inline void read_lexicon_into(Lexicon& lexicon, std::istream& in, const SymbolTable& symbols,
                              const std::string& origin = "<stream>",
                              bool apply_overrides = true) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw BadPhoneme(origin + ":" + std::to_string(lineno) + ": expected word<TAB>IPA");
        try {
            lexicon.add(make_word_form(line.substr(0, tab), line.substr(tab + 1), symbols,
                                       apply_overrides));
        } catch (const BadPhoneme& e) {
            throw BadPhoneme(origin + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DuplicateWord& e) {
            throw DuplicateWord(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline Lexicon load_lexicon(const std::vector<std::string>& paths, const SymbolTable& symbols,
                            bool apply_overrides = true) {
    Lexicon lexicon;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open lexicon '" + path + "'");
        read_lexicon_into(lexicon, in, symbols, path, apply_overrides);
    }
    return lexicon;
}

inline Lexicon load_lexicon(const std::string& path, const SymbolTable& symbols,
                            bool apply_overrides = true) {
    return load_lexicon(std::vector<std::string>{path}, symbols, apply_overrides);
}

/// Restriction of `lexicon` to the distinct words of the elicitation paragraph.
inline Lexicon paragraph_inventory(const Lexicon& lexicon) {
    Lexicon out;
    for (auto word : kElicitationParagraph) {
        if (!lexicon.contains(word)) throw MissingWord(std::string(word));
        out.add(lexicon.at(word));
    }
    return out;
}

}  // namespace accent
