#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "accent/error.hpp"
#include "accent/lattice.hpp"
#include "accent/lexicon.hpp"
#include "accent/model_params.hpp"
#include "accent/parallel.hpp"
#include "accent/word_hmm.hpp"

namespace accent {

/// Two words tie when their log-likelihoods differ by at most this much.
inline constexpr double kTieTolerance = 1e-9;

struct ScoredWord {
    std::string word;
    double log_probability;
};

struct Recognition {
    std::vector<std::string> tie_set;  // alphabetical
    std::vector<ScoredWord> ranking;   // best first; equal scores alphabetical

    bool contains(const std::string& word) const {
        return std::find(tie_set.begin(), tie_set.end(), word) != tie_set.end();
    }
};

/// Builds the tie-set and ranking from raw scores. With a uniform word
/// prior the arg-max of P(w | obs) is the arg-max of the likelihood.
inline Recognition rank_scores(std::vector<ScoredWord> scores,
                               double tolerance = kTieTolerance) {
    std::sort(scores.begin(), scores.end(), [](const ScoredWord& a, const ScoredWord& b) {
        if (a.log_probability != b.log_probability) return a.log_probability > b.log_probability;
        return a.word < b.word;
    });
    Recognition out;
    if (!scores.empty()) {
        const double best = scores.front().log_probability;
        for (const auto& s : scores) {
            if (best == s.log_probability || std::abs(best - s.log_probability) <= tolerance)
                out.tie_set.push_back(s.word);
        }
        std::sort(out.tie_set.begin(), out.tie_set.end());
    }
    out.ranking = std::move(scores);
    return out;
}

/// A lexicon compiled against one parameter set. Immutable; recognize() may
/// be called from several threads at once.
class Recognizer {
public:
    Recognizer(const Lexicon& lexicon, const ModelParams& params, std::size_t jobs = 1)
        : tables_(params), jobs_(jobs) {
        if (lexicon.empty()) throw EmptyLexicon();
        for (const auto& [word, form] : lexicon.entries()) {
            words_.push_back(word);
            auto& slots = slots_.emplace_back();
            for (const auto& p : form.phonemes) slots.push_back(tables_.slot(p));
        }
    }

    Recognition recognize(const std::vector<PhoneFeatures>& obs) const {
        std::vector<std::size_t> indices;
        indices.reserve(obs.size());
        for (const auto& v : obs) indices.push_back(FeatureSpace::index(v));
        std::vector<ScoredWord> scores(words_.size());
        parallel_for(words_.size(), jobs_, [&](std::size_t w) {
            scores[w] = {words_[w],
                         forward_log_likelihood(WordLattice(tables_, slots_[w], indices))};
        });
        return rank_scores(std::move(scores));
    }

    const ScoringTables& tables() const noexcept { return tables_; }

private:
    ScoringTables tables_;
    std::size_t jobs_;
    std::vector<std::string> words_;
    std::vector<std::vector<std::size_t>> slots_;
};

inline Recognition recognize(const std::vector<PhoneFeatures>& obs, const Lexicon& lexicon,
                             const ModelParams& params, std::size_t jobs = 1) {
    return Recognizer(lexicon, params, jobs).recognize(obs);
}

}  // namespace accent
