#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "accent/error.hpp"
#include "accent/phone_features.hpp"
#include "accent/utf8.hpp"

namespace accent {

/// IPA base symbol -> feature template, plus the diacritic policy.
///
/// File format: UTF-8, '#' starts a comment, one record per line:
///
///     symbol  kind  d2  d3  d4  d5
///
/// where kind is V or C. Vowel templates always carry d5 = 0; nasality and
/// diphthongs are derived while parsing. Multi-character symbols (affricate
/// digraphs such as "tʃ") are matched greedily, longest first.
class SymbolTable {
public:
    static constexpr char32_t kNasalMark = 0x0303;  // combining tilde

    SymbolTable() = default;

    static SymbolTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open symbol table '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str(), path);
    }

    static SymbolTable parse(std::string_view text, const std::string& origin = "<memory>") {
        SymbolTable table;
        std::istringstream lines{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream fields(line);
            std::string symbol, kind;
            if (!(fields >> symbol)) continue;
            int d2 = 0, d3 = 0, d4 = 0, d5 = 0;
            if (!(fields >> kind >> d2 >> d3 >> d4 >> d5) || (kind != "V" && kind != "C"))
                throw Error(origin + ":" + std::to_string(lineno) + ": malformed record");
            try {
                if (kind == "V") {
                    if (d5 != 0)
                        throw InvalidFeature("vowel templates must have d5 = 0");
                    table.add(symbol, PhoneFeatures::vowel(d2, d3, d4));
                } else {
                    table.add(symbol, PhoneFeatures::consonant(d2, d3, d4, d5));
                }
            } catch (const InvalidFeature& e) {
                throw Error(origin + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
        return table;
    }

    void add(const std::string& symbol, const PhoneFeatures& features) {
        const auto cps = utf8::decode(symbol);
        if (cps.empty()) throw Error("empty symbol");
        for (const auto& cp : cps)
            if (utf8::is_combining(cp.value))
                throw Error("symbol '" + symbol + "' contains a combining mark");
        if (!templates_.emplace(symbol, features).second)
            throw Error("duplicate symbol '" + symbol + "'");
        max_symbol_length_ = std::max(max_symbol_length_, cps.size());
    }

    bool contains(std::string_view symbol) const {
        return templates_.find(std::string(symbol)) != templates_.end();
    }

    std::optional<PhoneFeatures> find(std::string_view symbol) const {
        auto it = templates_.find(std::string(symbol));
        if (it == templates_.end()) return std::nullopt;
        return it->second;
    }

    /// Feature vector of a base symbol; `nasal` sets d6 on vowels.
    PhoneFeatures encode_symbol(std::string_view symbol, bool nasal = false) const {
        auto it = templates_.find(std::string(symbol));
        if (it == templates_.end()) throw UnknownSymbol(std::string(symbol));
        if (nasal && it->second.is_vowel()) return it->second.with_dim(6, 1);
        return it->second;
    }

    /// Longest symbol, in code points.
    std::size_t max_symbol_length() const noexcept { return max_symbol_length_; }
    std::size_t size() const noexcept { return templates_.size(); }
    const std::map<std::string, PhoneFeatures>& entries() const noexcept { return templates_; }

    /// Diacritics, modifier letters, length/stress marks and the few
    /// punctuation characters found inside transcriptions. Nothing here
    /// carries a feature.
    static bool is_ignorable(char32_t cp) {
        if (cp == kNasalMark) return false;
        if (utf8::is_combining(cp)) return true;
        if (cp >= 0x02B0 && cp <= 0x02FF) return true;  // spacing modifier letters
        if (cp >= 0x1D2C && cp <= 0x1D6A) return true;  // modifier small letters
        if (cp >= 0x1D9B && cp <= 0x1DBF) return true;
        if (cp >= 0x2070 && cp <= 0x209F) return true;  // super/subscripts
        switch (cp) {
            case 0x00B2: case 0x00B3: case 0x00B9:
            case U':': case U'\'': case U'.': case U',': case U'`': case U'"':
            case U'-': case U'|': case U'!': case U'?': case U';':
            case 0x2018: case 0x2019: case 0x201C: case 0x201D:
                return true;
            default:
                return false;
        }
    }

    /// Canonical spelling of a feature vector for reports: the first table
    /// symbol with the same template, plus a tilde for nasal vowels and a
    /// ":dip"/":dip2" suffix for diphthongs.
    std::string describe(const PhoneFeatures& v) const {
        PhoneFeatures base = v;
        if (v.is_vowel()) base = PhoneFeatures::vowel(v.d2(), v.d3(), v.d4());
        std::string out;
        for (const auto& [symbol, features] : templates_) {
            if (features == base) {
                out = symbol;
                break;
            }
        }
        if (out.empty()) return v.to_string();
        if (v.is_vowel()) {
            if (v.d6()) utf8::append(out, kNasalMark);
            if (v.d5() == 1) out += ":dip";
            if (v.d5() == 2) out += ":dip2";
        }
        return out;
    }

private:
    std::map<std::string, PhoneFeatures> templates_;
    std::size_t max_symbol_length_ = 0;
};

}  // namespace accent
