#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "accent/error.hpp"
#include "accent/lexicon.hpp"
#include "accent/model_params.hpp"
#include "accent/parallel.hpp"
#include "accent/word_hmm.hpp"

namespace accent {

/// Hard transition and emission counts tallied from Viterbi alignments.
/// The terminal exit arc is not counted.
struct TransformCounts {
    std::size_t n_ins = 0;
    std::size_t n_not_ins = 0;  // produce + delete steps
    std::map<Phoneme, std::size_t> n_del;
    std::map<Phoneme, std::size_t> n_prod;
    std::map<PhoneFeatures, std::size_t> n_v_ins;
    std::map<std::pair<Phoneme, PhoneFeatures>, std::size_t> n_v_prod;

    void add(const Alignment& alignment) {
        for (const auto& s : alignment.steps) {
            switch (s.kind) {
                case StepKind::Produce:
                    ++n_not_ins;
                    ++n_prod[s.phoneme];
                    ++n_v_prod[{s.phoneme, s.vector}];
                    break;
                case StepKind::Delete:
                    ++n_not_ins;
                    ++n_del[s.phoneme];
                    break;
                case StepKind::Insert:
                    ++n_ins;
                    ++n_v_ins[s.vector];
                    break;
            }
        }
    }

    TransformCounts& operator+=(const TransformCounts& o) {
        n_ins += o.n_ins;
        n_not_ins += o.n_not_ins;
        for (const auto& [k, c] : o.n_del) n_del[k] += c;
        for (const auto& [k, c] : o.n_prod) n_prod[k] += c;
        for (const auto& [k, c] : o.n_v_ins) n_v_ins[k] += c;
        for (const auto& [k, c] : o.n_v_prod) n_v_prod[k] += c;
        return *this;
    }

    std::size_t del(const Phoneme& p) const { return lookup(n_del, p); }
    std::size_t prod(const Phoneme& p) const { return lookup(n_prod, p); }
    std::size_t ins(const PhoneFeatures& v) const { return lookup(n_v_ins, v); }
    std::size_t prod(const Phoneme& p, const PhoneFeatures& v) const {
        return lookup(n_v_prod, std::pair{p, v});
    }

    /// True when the marginal totals agree with the detailed tallies.
    bool consistent() const {
        std::size_t ins_total = 0;
        for (const auto& [v, c] : n_v_ins) ins_total += c;
        if (ins_total != n_ins) return false;
        std::map<Phoneme, std::size_t> prod_total;
        for (const auto& [key, c] : n_v_prod) prod_total[key.first] += c;
        for (auto& [p, c] : prod_total)
            if (prod(p) != c) return false;
        for (const auto& [p, c] : n_prod)
            if (c != 0 && !prod_total.count(p)) return false;
        std::size_t not_ins = 0;
        for (const auto& [p, c] : n_del) not_ins += c;
        for (const auto& [p, c] : n_prod) not_ins += c;
        return not_ins == n_not_ins;
    }

    friend bool operator==(const TransformCounts&, const TransformCounts&) = default;

private:
    template <typename Map, typename Key>
    static std::size_t lookup(const Map& m, const Key& k) {
        auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    }
};

inline TransformCounts accumulate_counts(const std::vector<Alignment>& alignments) {
    TransformCounts counts;
    for (const auto& a : alignments) counts.add(a);
    return counts;
}

/// Blends counts with the current parameters, which act as a prior of
/// weight C: P' = (N + C * P) / (N_total + C).
inline ModelParams update_params(const ModelParams& params, const TransformCounts& counts) {
    if (!counts.consistent()) throw Error("transformation counts are inconsistent");
    const double c = params.prior_weight;
    ModelParams out = params;

    // (N + C*P) / (T + C), evaluated as P * C/(T + C) + N/(T + C) so that
    // zero counts reproduce P bit for bit.
    auto blend = [c](double prior, double n, double total) {
        const double den = total + c;
        return prior * (c / den) + n / den;
    };

    out.p_ins = blend(params.p_ins, static_cast<double>(counts.n_ins),
                      static_cast<double>(counts.n_ins + counts.n_not_ins));

    const double ins_total = static_cast<double>(counts.n_ins);
    for (std::size_t i = 0; i < out.emit_ins.size(); ++i)
        out.emit_ins[i] = blend(params.emit_ins[i], 0.0, ins_total);
    for (const auto& [v, n] : counts.n_v_ins)
        out.emit_ins[FeatureSpace::index(v)] += static_cast<double>(n) / (ins_total + c);

    auto require = [&](const Phoneme& p) {
        if (!params.has_phoneme(p))
            throw Error("counts mention phoneme " + p.to_string() + " without parameters");
    };
    for (const auto& [p, n] : counts.n_del) require(p);
    for (const auto& [p, n] : counts.n_prod) require(p);

    for (auto& [p, del_bar] : out.p_del_bar) {
        const double nd = static_cast<double>(counts.del(p));
        const double np = static_cast<double>(counts.prod(p));
        del_bar = blend(params.del_bar(p), nd, nd + np);
    }

    for (auto& [p, dist] : out.emit) {
        const double total = static_cast<double>(counts.prod(p));
        for (auto& x : dist) x = blend(x, 0.0, total);
        auto lo = counts.n_v_prod.lower_bound({p, FeatureSpace::at(0)});
        for (auto it = lo; it != counts.n_v_prod.end() && it->first.first == p; ++it)
            dist[FeatureSpace::index(it->first.second)] += static_cast<double>(it->second) / (total + c);
    }
    return out;
}

/// A (word, foreign pronunciation) couple.
struct TrainingPair {
    WordForm form;
    std::vector<PhoneFeatures> obs;
};

/// Viterbi-aligns every pair under the given parameters.
inline std::vector<Alignment> align_pairs(const ModelParams& params,
                                          const std::vector<TrainingPair>& pairs,
                                          std::size_t jobs = 1) {
    const ScoringTables tables(params);
    std::vector<Alignment> out(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        out[i] = viterbi_align(WordHmm(pairs[i].form), pairs[i].obs, tables);
    });
    return out;
}

/// One batch adaptation pass: align under the input parameters, count,
/// update once.
inline ModelParams adapt(const ModelParams& params, const std::vector<TrainingPair>& pairs,
                         std::size_t jobs = 1) {
    return update_params(params, accumulate_counts(align_pairs(params, pairs, jobs)));
}

}  // namespace accent
