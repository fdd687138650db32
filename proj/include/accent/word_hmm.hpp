#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "accent/error.hpp"
#include "accent/lattice.hpp"
#include "accent/lexicon.hpp"
#include "accent/model_params.hpp"
#include "accent/phone_features.hpp"

namespace accent {

/// The left-to-right word automaton over states S_1..S_{n+2}.
/// phon(S_i) = p_i for 1 <= i <= n; S_{n+1} only inserts or exits.
class WordHmm {
public:
    explicit WordHmm(const WordForm& form) : word_(form.word), phonemes_(form.phonemes) {
        if (phonemes_.empty()) throw EmptyWord("word '" + word_ + "' has no phonemes");
    }

    const std::string& word() const noexcept { return word_; }
    const std::vector<Phoneme>& phonemes() const noexcept { return phonemes_; }
    std::size_t phoneme_count() const noexcept { return phonemes_.size(); }
    std::size_t state_count() const noexcept { return phonemes_.size() + 2; }

    /// phon(S_i), 1-based.
    const Phoneme& phon(std::size_t i) const {
        if (i < 1 || i > phonemes_.size()) throw Error("state has no phoneme label");
        return phonemes_[i - 1];
    }

    bool has_self_loop(std::size_t i) const { return i >= 1 && i <= phonemes_.size() + 1; }

    friend bool operator==(const WordHmm&, const WordHmm&) = default;

private:
    std::string word_;
    std::vector<Phoneme> phonemes_;
};

inline WordHmm build_word_hmm(const WordForm& form) { return WordHmm(form); }

/// Binds one word automaton and one observation sequence to a scoring table.
class WordLattice {
public:
    WordLattice(const ScoringTables& tables, const WordHmm& hmm, const std::vector<PhoneFeatures>& obs)
        : tables_(&tables) {
        slots_.reserve(hmm.phoneme_count());
        for (const auto& p : hmm.phonemes()) slots_.push_back(tables.slot(p));
        obs_.reserve(obs.size());
        for (const auto& v : obs) obs_.push_back(FeatureSpace::index(v));
    }

    WordLattice(const ScoringTables& tables, std::vector<std::size_t> slots,
                std::vector<std::size_t> obs_indices)
        : tables_(&tables), slots_(std::move(slots)), obs_(std::move(obs_indices)) {}

    std::size_t phoneme_count() const noexcept { return slots_.size(); }
    std::size_t observation_count() const noexcept { return obs_.size(); }
    double log_produce(std::size_t i, std::size_t k) const {
        const auto s = slots_[i - 1];
        return tables_->log_prod(s) + tables_->log_emit(s, obs_[k]);
    }
    double log_delete(std::size_t i) const { return tables_->log_del(slots_[i - 1]); }
    double log_insert(std::size_t k) const {
        return tables_->log_ins() + tables_->log_emit_ins(obs_[k]);
    }
    double log_exit() const { return tables_->log_exit(); }

private:
    const ScoringTables* tables_;
    std::vector<std::size_t> slots_;
    std::vector<std::size_t> obs_;
};

static_assert(LatticeModel<WordLattice>);

/// log P(v_1..v_m, S_{n+2} | R(w)).
inline double forward_likelihood(const WordHmm& hmm, const std::vector<PhoneFeatures>& obs,
                                 const ScoringTables& tables) {
    return forward_log_likelihood(WordLattice(tables, hmm, obs));
}

inline double forward_likelihood(const WordHmm& hmm, const std::vector<PhoneFeatures>& obs,
                                 const ModelParams& params) {
    return forward_likelihood(hmm, obs, ScoringTables(params));
}

struct AlignmentStep {
    StepKind kind;
    Phoneme phoneme;       // meaningful for Produce and Delete
    PhoneFeatures vector;  // meaningful for Produce and Insert

    friend bool operator==(const AlignmentStep&, const AlignmentStep&) = default;
};

/// Decoded operation sequence for one (word, observation) pair.
struct Alignment {
    std::string word;
    std::vector<AlignmentStep> steps;
    double log_probability = kLogZero;

    /// Phonemes spelled by Produce and Delete steps, in order.
    std::vector<Phoneme> spelled_phonemes() const {
        std::vector<Phoneme> out;
        for (const auto& s : steps)
            if (s.kind != StepKind::Insert) out.push_back(s.phoneme);
        return out;
    }

    /// Vectors emitted by Produce and Insert steps, in order.
    std::vector<PhoneFeatures> emitted_vectors() const {
        std::vector<PhoneFeatures> out;
        for (const auto& s : steps)
            if (s.kind != StepKind::Delete) out.push_back(s.vector);
        return out;
    }
};

inline Alignment viterbi_align(const WordHmm& hmm, const std::vector<PhoneFeatures>& obs,
                               const ScoringTables& tables) {
    const auto path = viterbi_path(WordLattice(tables, hmm, obs));
    Alignment out;
    out.word = hmm.word();
    out.log_probability = path.log_probability;
    out.steps.reserve(path.steps.size());
    // Unused fields repeat a real value so that steps compare deterministically.
    for (const auto& s : path.steps) {
        switch (s.kind) {
            case StepKind::Produce:
                out.steps.push_back({s.kind, hmm.phon(s.phoneme), obs[s.observation]});
                break;
            case StepKind::Delete:
                out.steps.push_back({s.kind, hmm.phon(s.phoneme), hmm.phon(s.phoneme)});
                break;
            case StepKind::Insert:
                out.steps.push_back({s.kind, obs[s.observation], obs[s.observation]});
                break;
        }
    }
    return out;
}

inline Alignment viterbi_align(const WordHmm& hmm, const std::vector<PhoneFeatures>& obs,
                               const ModelParams& params) {
    return viterbi_align(hmm, obs, ScoringTables(params));
}

}  // namespace accent
