#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accent/error.hpp"
#include "accent/phone_features.hpp"
#include "accent/symbol_table.hpp"
#include "accent/utf8.hpp"

namespace accent {

struct PhoneToken {
    std::string symbol;  // base symbol, plus a tilde when nasalized
    PhoneFeatures features;
    std::size_t offset;  // byte offset in the source text
};

namespace detail {

struct Decomposition {
    char32_t composed;
    char32_t base;
    char32_t mark;
};

// Precomposed Latin vowels (and n) that turn up in transcriptions.
inline constexpr Decomposition kDecompositions[] = {
    {0x00E0, U'a', 0x0300}, {0x00E1, U'a', 0x0301}, {0x00E2, U'a', 0x0302},
    {0x00E3, U'a', 0x0303}, {0x00E4, U'a', 0x0308}, {0x00E5, U'a', 0x030A},
    {0x00E8, U'e', 0x0300}, {0x00E9, U'e', 0x0301}, {0x00EA, U'e', 0x0302},
    {0x00EB, U'e', 0x0308}, {0x00EC, U'i', 0x0300}, {0x00ED, U'i', 0x0301},
    {0x00EE, U'i', 0x0302}, {0x00EF, U'i', 0x0308}, {0x00F1, U'n', 0x0303},
    {0x00F2, U'o', 0x0300}, {0x00F3, U'o', 0x0301}, {0x00F4, U'o', 0x0302},
    {0x00F5, U'o', 0x0303}, {0x00F6, U'o', 0x0308}, {0x00F9, U'u', 0x0300},
    {0x00FA, U'u', 0x0301}, {0x00FB, U'u', 0x0302}, {0x00FC, U'u', 0x0308},
    {0x00FD, U'y', 0x0301}, {0x00FF, U'y', 0x0308}, {0x0101, U'a', 0x0304},
    {0x0103, U'a', 0x0306}, {0x0113, U'e', 0x0304}, {0x0115, U'e', 0x0306},
    {0x011B, U'e', 0x030C}, {0x0129, U'i', 0x0303}, {0x012B, U'i', 0x0304},
    {0x012D, U'i', 0x0306}, {0x014D, U'o', 0x0304}, {0x014F, U'o', 0x0306},
    {0x0169, U'u', 0x0303}, {0x016B, U'u', 0x0304}, {0x016D, U'u', 0x0306},
    {0x01CE, U'a', 0x030C}, {0x01D0, U'i', 0x030C}, {0x01D2, U'o', 0x030C},
    {0x01D4, U'u', 0x030C}, {0x1EBD, U'e', 0x0303}, {0x1EF9, U'y', 0x0303},
};

struct Cluster {
    std::string base;
    bool nasal = false;
    std::size_t offset = 0;
};

// Splits text into base-symbol clusters, dropping ignorable marks.
inline std::vector<Cluster> clusters(std::string_view text) {
    std::vector<utf8::CodePoint> cps;
    for (const auto& cp : utf8::decode(text)) {
        bool split = false;
        for (const auto& d : kDecompositions) {
            if (d.composed == cp.value) {
                cps.push_back({d.base, cp.offset, cp.length});
                cps.push_back({d.mark, cp.offset, 0});
                split = true;
                break;
            }
        }
        if (!split) cps.push_back(cp);
    }

    std::vector<Cluster> out;
    bool attached = false;  // whether combining marks attach to out.back()
    for (const auto& cp : cps) {
        if (cp.value == SymbolTable::kNasalMark) {
            if (attached) out.back().nasal = true;
            continue;
        }
        if (SymbolTable::is_ignorable(cp.value)) {
            if (!utf8::is_combining(cp.value)) attached = false;
            continue;
        }
        if (utf8::is_space(cp.value))
            throw Error("whitespace inside word at byte " + std::to_string(cp.offset));
        out.push_back({utf8::encode(cp.value), false, cp.offset});
        attached = true;
    }
    return out;
}

inline std::string_view trim_word(std::string_view text) {
    auto is_edge = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '[' || c == ']' ||
               c == '/';
    };
    while (!text.empty() && is_edge(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_edge(text.back())) text.remove_suffix(1);
    return text;
}

}  // namespace detail

/// Merges two consecutive vowels into a diphthong when the second is not
/// more open than the first. The result is v1 with d5 = 1 (same rounding)
/// or d5 = 2 (rounding differs); nullopt means no merge.
inline std::optional<PhoneFeatures> merge_diphthong(const PhoneFeatures& v1,
                                                    const PhoneFeatures& v2) {
    if (!v1.is_vowel() || !v2.is_vowel()) throw NotAVowel("diphthong merge needs two vowels");
    if (v2.d2() > v1.d2()) return std::nullopt;
    return v1.with_dim(5, v1.d4() == v2.d4() ? 1 : 2);
}

/// Tokenizes one transcribed word into phones (before diphthong merging).
inline std::vector<PhoneToken> tokenize_word(std::string_view text, const SymbolTable& table) {
    const std::string_view word = detail::trim_word(text);
    const std::size_t base_offset = static_cast<std::size_t>(word.data() - text.data());
    const auto cl = detail::clusters(word);

    std::vector<PhoneToken> out;
    std::size_t i = 0;
    while (i < cl.size()) {
        bool matched = false;
        const std::size_t longest = std::min(table.max_symbol_length(), cl.size() - i);
        for (std::size_t len = longest; len >= 1 && !matched; --len) {
            std::string key;
            bool nasal = false;
            for (std::size_t k = 0; k < len; ++k) {
                key += cl[i + k].base;
                nasal = nasal || cl[i + k].nasal;
            }
            if (auto f = table.find(key)) {
                PhoneToken tok{key, *f, base_offset + cl[i].offset};
                if (nasal && f->is_vowel()) {
                    tok.features = f->with_dim(6, 1);
                    utf8::append(tok.symbol, SymbolTable::kNasalMark);
                }
                out.push_back(std::move(tok));
                i += len;
                matched = true;
            }
        }
        if (!matched) throw UnknownSymbol(cl[i].base, base_offset + cl[i].offset);
    }
    return out;
}

/// Applies diphthong merging greedily, left to right, in a single pass.
/// A vowel consumed by a merge never starts another merge.
inline std::vector<PhoneFeatures> merge_diphthongs(const std::vector<PhoneFeatures>& phones) {
    std::vector<PhoneFeatures> out;
    out.reserve(phones.size());
    std::size_t i = 0;
    while (i < phones.size()) {
        if (i + 1 < phones.size() && phones[i].is_vowel() && phones[i + 1].is_vowel()) {
            if (auto merged = merge_diphthong(phones[i], phones[i + 1])) {
                out.push_back(*merged);
                i += 2;
                continue;
            }
        }
        out.push_back(phones[i]);
        ++i;
    }
    return out;
}

/// Parses one transcribed word into its feature-vector sequence.
inline std::vector<PhoneFeatures> parse_word_transcription(std::string_view text,
                                                           const SymbolTable& table) {
    std::vector<PhoneFeatures> phones;
    for (auto& tok : tokenize_word(text, table)) phones.push_back(tok.features);
    if (phones.empty()) throw EmptyWord("no phones in '" + std::string(text) + "'");
    return merge_diphthongs(phones);
}

}  // namespace accent
