#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "accent/error.hpp"

namespace accent {

enum class Kind { Vowel, Consonant };

/// Closed integer range of one feature dimension.
struct DimensionRange {
    int lo;
    int hi;
    constexpr int size() const { return hi - lo + 1; }
    constexpr bool contains(int v) const { return v >= lo && v <= hi; }
};

/*
 * Discrete phone feature vector.
 *
 *   dim   vowel                         consonant
 *   d2    open/close  1 close..7 open   place   1 glottal..11 bilabial
 *   d3    back/front  1 back..3 front   manner  1 lateral approx..7 plosive
 *   d4    rounded     0..1              voice   2 voiceless, 1 voiced, 0 nasal
 *   d5    diphthong   0..2              affricate 0..1
 *   d6    nasal       0..1              (always 0)
 *
 * The kind compares first, so a vowel never equals a consonant.
 */
class PhoneFeatures {
public:
    static constexpr std::size_t kVowelDims = 5;      // d2..d6
    static constexpr std::size_t kConsonantDims = 4;  // d2..d5

    static constexpr std::array<DimensionRange, kVowelDims> kVowelRanges{
        {{1, 7}, {1, 3}, {0, 1}, {0, 2}, {0, 1}}};
    static constexpr std::array<DimensionRange, kConsonantDims> kConsonantRanges{
        {{1, 11}, {1, 7}, {0, 2}, {0, 1}}};

    static PhoneFeatures vowel(int height, int backness, int rounded, int diphthong = 0,
                               int nasal = 0) {
        return PhoneFeatures(Kind::Vowel, {height, backness, rounded, diphthong, nasal});
    }

    static PhoneFeatures consonant(int place, int manner, int voice, int affricate = 0) {
        return PhoneFeatures(Kind::Consonant, {place, manner, voice, affricate, 0});
    }

    Kind kind() const noexcept { return kind_; }
    bool is_vowel() const noexcept { return kind_ == Kind::Vowel; }

    /// Value of dimension `d` for d in 2..6.
    int dim(std::size_t d) const { return dims_.at(d - 2); }
    int d2() const noexcept { return dims_[0]; }
    int d3() const noexcept { return dims_[1]; }
    int d4() const noexcept { return dims_[2]; }
    int d5() const noexcept { return dims_[3]; }
    int d6() const noexcept { return dims_[4]; }

    /// Number of dimensions after the kind indicator.
    std::size_t dimension_count() const noexcept {
        return is_vowel() ? kVowelDims : kConsonantDims;
    }

    DimensionRange range(std::size_t d) const {
        return is_vowel() ? kVowelRanges.at(d - 2) : kConsonantRanges.at(d - 2);
    }

    PhoneFeatures with_dim(std::size_t d, int value) const {
        auto dims = dims_;
        dims.at(d - 2) = value;
        return PhoneFeatures(kind_, dims);
    }

    friend auto operator<=>(const PhoneFeatures&, const PhoneFeatures&) = default;
    friend bool operator==(const PhoneFeatures&, const PhoneFeatures&) = default;

    /// Compact text form, e.g. "V(4,2,0,2,0)" or "C(8,4,2,0)".
    std::string to_string() const {
        std::string out = is_vowel() ? "V(" : "C(";
        for (std::size_t i = 0; i < dimension_count(); ++i) {
            if (i) out += ',';
            out += std::to_string(dims_[i]);
        }
        out += ')';
        return out;
    }

private:
    PhoneFeatures(Kind kind, std::array<int, 5> dims) : kind_(kind), dims_(dims) {
        if (kind == Kind::Vowel) {
            for (std::size_t i = 0; i < kVowelDims; ++i)
                if (!kVowelRanges[i].contains(dims[i]))
                    throw InvalidFeature("vowel dimension d" + std::to_string(i + 2) +
                                         " out of range: " + std::to_string(dims[i]));
        } else {
            for (std::size_t i = 0; i < kConsonantDims; ++i)
                if (!kConsonantRanges[i].contains(dims[i]))
                    throw InvalidFeature("consonant dimension d" + std::to_string(i + 2) +
                                         " out of range: " + std::to_string(dims[i]));
            if (dims[4] != 0) throw InvalidFeature("consonants carry no d6");
        }
    }

    Kind kind_;
    std::array<int, 5> dims_;
};

using Phoneme = PhoneFeatures;

/// The set V of all valid feature vectors, with a dense index.
/// Vowels occupy [0, 252), consonants [252, 714).
class FeatureSpace {
public:
    static constexpr std::size_t kVowelCount = 7 * 3 * 2 * 3 * 2;
    static constexpr std::size_t kConsonantCount = 11 * 7 * 3 * 2;
    static constexpr std::size_t kSize = kVowelCount + kConsonantCount;

    static constexpr std::size_t size() noexcept { return kSize; }

    static std::size_t index(const PhoneFeatures& v) {
        if (v.is_vowel()) {
            return ((((static_cast<std::size_t>(v.d2() - 1) * 3 + (v.d3() - 1)) * 2 + v.d4()) *
                         3 +
                     v.d5()) *
                        2 +
                    v.d6());
        }
        return kVowelCount +
               (((static_cast<std::size_t>(v.d2() - 1) * 7 + (v.d3() - 1)) * 3 + v.d4()) * 2 +
                v.d5());
    }

    static PhoneFeatures at(std::size_t i) {
        if (i >= kSize) throw InvalidFeature("feature index out of range");
        if (i < kVowelCount) {
            const int nasal = static_cast<int>(i % 2);
            i /= 2;
            const int diph = static_cast<int>(i % 3);
            i /= 3;
            const int round = static_cast<int>(i % 2);
            i /= 2;
            const int back = static_cast<int>(i % 3) + 1;
            const int height = static_cast<int>(i / 3) + 1;
            return PhoneFeatures::vowel(height, back, round, diph, nasal);
        }
        i -= kVowelCount;
        const int affricate = static_cast<int>(i % 2);
        i /= 2;
        const int voice = static_cast<int>(i % 3);
        i /= 3;
        const int manner = static_cast<int>(i % 7) + 1;
        const int place = static_cast<int>(i / 7) + 1;
        return PhoneFeatures::consonant(place, manner, voice, affricate);
    }

    /// Every vector, in index order.
    static const std::vector<PhoneFeatures>& vectors() {
        static const std::vector<PhoneFeatures> all = [] {
            std::vector<PhoneFeatures> out;
            out.reserve(kSize);
            for (std::size_t i = 0; i < kSize; ++i) out.push_back(at(i));
            return out;
        }();
        return all;
    }
};

}  // namespace accent
