#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "accent/error.hpp"
#include "accent/lexicon.hpp"
#include "accent/phone_features.hpp"

namespace accent {

/// Initial constants of the naive listener.
struct NaiveSettings {
    double p_ins = 0.01;
    double p_del = 0.01;  // P(del | p, not ins)
    double sigma = 2.0 / 3.0;
    double prior_weight = 20.0;

    void validate() const {
        if (!(p_ins > 0.0 && p_ins < 1.0)) throw Error("p_ins must lie in (0, 1)");
        if (!(p_del > 0.0 && p_del < 1.0)) throw Error("p_del must lie in (0, 1)");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("sigma must be positive");
        if (!(prior_weight > 0.0) || !std::isfinite(prior_weight))
            throw Error("prior weight must be positive");
    }
};

/// Distribution over the feature space, indexed by FeatureSpace::index.
using FeatureDistribution = std::vector<double>;

/// All free parameters of the word models.
struct ModelParams {
    double p_ins = 0.0;
    FeatureDistribution emit_ins;                  // P(v | ins)
    std::map<Phoneme, double> p_del_bar;           // P(del | p, not ins)
    std::map<Phoneme, FeatureDistribution> emit;   // P(v | p)
    double prior_weight = 20.0;
    double sigma = 2.0 / 3.0;

    double p_del(const Phoneme& p) const { return (1.0 - p_ins) * del_bar(p); }

    /// Computed as the complement so that p_ins + p_del + p_prod == 1 exactly
    /// when summed in that order.
    double p_prod(const Phoneme& p) const { return 1.0 - (p_ins + p_del(p)); }

    double p_exit() const { return 1.0 - p_ins; }

    double del_bar(const Phoneme& p) const {
        auto it = p_del_bar.find(p);
        if (it == p_del_bar.end()) throw Error("no parameters for phoneme " + p.to_string());
        return it->second;
    }

    const FeatureDistribution& emission(const Phoneme& p) const {
        auto it = emit.find(p);
        if (it == emit.end()) throw Error("no parameters for phoneme " + p.to_string());
        return it->second;
    }

    bool has_phoneme(const Phoneme& p) const { return emit.count(p) != 0; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Discretized bell curve over an integer range, normalized to sum 1.
inline std::vector<double> bell_distribution(int center, DimensionRange range, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(range.size()));
    const double two_var = 2.0 * sigma * sigma;
    for (int d = range.lo; d <= range.hi; ++d) {
        const double diff = d - center;
        w[static_cast<std::size_t>(d - range.lo)] = std::exp(-diff * diff / two_var);
    }
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= z;
    return w;
}

/// P(v | p) as a product of per-dimension factors: the kind must match,
/// and every other dimension follows a bell curve around p's value.
inline FeatureDistribution naive_emission(const Phoneme& p, double sigma) {
    std::vector<std::vector<double>> factors;
    for (std::size_t d = 2; d < 2 + p.dimension_count(); ++d)
        factors.push_back(bell_distribution(p.dim(d), p.range(d), sigma));

    FeatureDistribution dist(FeatureSpace::size(), 0.0);
    const auto& space = FeatureSpace::vectors();
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& v = space[i];
        if (v.kind() != p.kind()) continue;
        double prob = 1.0;
        for (std::size_t d = 2; d < 2 + p.dimension_count(); ++d)
            prob *= factors[d - 2][static_cast<std::size_t>(v.dim(d) - v.range(d).lo)];
        dist[i] = prob;
    }
    return dist;
}

inline ModelParams init_naive_params(const PhonemeInventory& inventory,
                                     const NaiveSettings& settings = {}) {
    if (inventory.empty()) throw Error("phoneme inventory is empty");
    settings.validate();
    ModelParams params;
    params.p_ins = settings.p_ins;
    params.emit_ins.assign(FeatureSpace::size(), 1.0 / static_cast<double>(FeatureSpace::size()));
    params.prior_weight = settings.prior_weight;
    params.sigma = settings.sigma;
    for (const auto& p : inventory) {
        params.p_del_bar[p] = settings.p_del;
        params.emit[p] = naive_emission(p, settings.sigma);
    }
    return params;
}

/// Checks every stochasticity invariant; returns an empty string when all
/// hold, otherwise a description of the first violation.
inline std::string check_invariants(const ModelParams& params, double tolerance = 1e-9) {
    auto sum = [](const FeatureDistribution& d) { return std::accumulate(d.begin(), d.end(), 0.0); };
    if (!(params.p_ins >= 0.0 && params.p_ins <= 1.0)) return "p_ins outside [0, 1]";
    if (params.emit_ins.size() != FeatureSpace::size()) return "emit_ins has wrong size";
    if (std::abs(sum(params.emit_ins) - 1.0) > tolerance) return "emit_ins does not sum to 1";
    if (params.emit.size() != params.p_del_bar.size()) return "phoneme tables disagree";
    for (const auto& [p, dist] : params.emit) {
        if (!params.p_del_bar.count(p)) return "missing P(del) for " + p.to_string();
        const double del_bar = params.p_del_bar.at(p);
        if (!(del_bar >= 0.0 && del_bar <= 1.0)) return "P(del|p,~ins) outside [0, 1]";
        if (params.p_ins + params.p_del(p) + params.p_prod(p) != 1.0)
            return "transition probabilities of " + p.to_string() + " do not sum to 1";
        if (dist.size() != FeatureSpace::size()) return "emission has wrong size";
        if (std::abs(sum(dist) - 1.0) > tolerance)
            return "emission of " + p.to_string() + " does not sum to 1";
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i] < 0.0) return "negative emission probability";
            if (FeatureSpace::at(i).kind() != p.kind() && dist[i] != 0.0)
                return "emission of " + p.to_string() + " crosses the vowel/consonant barrier";
        }
    }
    return {};
}

/// Log-domain view of a parameter set, built once and shared by every
/// lattice evaluated under it.
class ScoringTables {
public:
    explicit ScoringTables(const ModelParams& params)
        : log_ins_(safe_log(params.p_ins)), log_exit_(safe_log(params.p_exit())) {
        log_emit_ins_.reserve(params.emit_ins.size());
        for (double p : params.emit_ins) log_emit_ins_.push_back(safe_log(p));
        for (const auto& [phoneme, dist] : params.emit) {
            slots_.emplace(phoneme, log_del_.size());
            log_del_.push_back(safe_log(params.p_del(phoneme)));
            log_prod_.push_back(safe_log(params.p_prod(phoneme)));
            auto& row = log_emit_.emplace_back();
            row.reserve(dist.size());
            for (double p : dist) row.push_back(safe_log(p));
        }
    }

    /// Dense slot of a phoneme; throws when the parameters do not cover it.
    std::size_t slot(const Phoneme& p) const {
        auto it = slots_.find(p);
        if (it == slots_.end()) throw Error("no parameters for phoneme " + p.to_string());
        return it->second;
    }

    double log_ins() const noexcept { return log_ins_; }
    double log_exit() const noexcept { return log_exit_; }
    double log_emit_ins(std::size_t v) const { return log_emit_ins_[v]; }
    double log_del(std::size_t slot) const { return log_del_[slot]; }
    double log_prod(std::size_t slot) const { return log_prod_[slot]; }
    double log_emit(std::size_t slot, std::size_t v) const { return log_emit_[slot][v]; }

private:
    static double safe_log(double p) {
        return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }

    double log_ins_;
    double log_exit_;
    std::vector<double> log_emit_ins_;
    std::map<Phoneme, std::size_t> slots_;
    std::vector<double> log_del_;
    std::vector<double> log_prod_;
    std::vector<std::vector<double>> log_emit_;
};

}  // namespace accent
