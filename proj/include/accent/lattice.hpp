#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <vector>

namespace accent {

/// Log-domain arc weights of a left-to-right insertion/deletion/substitution
/// lattice with n phoneme states and m observations.
///
/// Lattice node (k, i) means "k observations consumed, in state S_i".
/// From (k, i), i <= n, three arcs leave:
///   produce  (k, i) -> (k+1, i+1)   weight log_produce(i, k)
///   delete   (k, i) -> (k,   i+1)   weight log_delete(i)
///   insert   (k, i) -> (k+1, i)     weight log_insert(k)   (also from i = n+1)
/// and the final arc (m, n+1) -> S_{n+2} has weight log_exit().
/// State indices are 1-based; observation indices are 0-based.
template <typename M>
concept LatticeModel = requires(const M& m, std::size_t i, std::size_t k) {
    { m.phoneme_count() } -> std::convertible_to<std::size_t>;
    { m.observation_count() } -> std::convertible_to<std::size_t>;
    { m.log_produce(i, k) } -> std::convertible_to<double>;
    { m.log_delete(i) } -> std::convertible_to<double>;
    { m.log_insert(k) } -> std::convertible_to<double>;
    { m.log_exit() } -> std::convertible_to<double>;
};

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kLogZero) return a;
    return a + std::log1p(std::exp(b - a));
}

/// Total log-probability over all lattice paths.
template <LatticeModel M>
double forward_log_likelihood(const M& model) {
    const std::size_t n = model.phoneme_count();
    const std::size_t m = model.observation_count();
    const std::size_t width = n + 2;  // columns 0..n+1, column 0 unused
    std::vector<double> alpha((m + 1) * width, kLogZero);
    auto at = [&](std::size_t k, std::size_t i) -> double& { return alpha[k * width + i]; };

    at(0, 1) = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        for (std::size_t i = 1; i <= n + 1; ++i) {
            if (k == 0 && i == 1) continue;
            double acc = kLogZero;
            if (k > 0 && i > 1) acc = log_add(acc, at(k - 1, i - 1) + model.log_produce(i - 1, k - 1));
            if (i > 1) acc = log_add(acc, at(k, i - 1) + model.log_delete(i - 1));
            if (k > 0) acc = log_add(acc, at(k - 1, i) + model.log_insert(k - 1));
            at(k, i) = acc;
        }
    }
    return at(m, n + 1) + model.log_exit();
}

enum class StepKind { Produce, Delete, Insert };

/// One decoded arc. `phoneme` is the 1-based state index for Produce/Delete;
/// `observation` is the 0-based observation index for Produce/Insert.
struct LatticeStep {
    StepKind kind;
    std::size_t phoneme;
    std::size_t observation;

    friend bool operator==(const LatticeStep&, const LatticeStep&) = default;
};

struct LatticePath {
    std::vector<LatticeStep> steps;
    double log_probability = kLogZero;
};

/// Relative slack under which two log weights count as equal. Paths that
/// use the same arcs in a different order sum them in a different order too,
/// so exact ties can differ in the last bits.
inline constexpr double kTieSlack = 1e-12;

/// Maximum-weight lattice path. Among equal-weight predecessors the choice
/// is Produce, then Delete, then Insert.
template <LatticeModel M>
LatticePath viterbi_path(const M& model) {
    const std::size_t n = model.phoneme_count();
    const std::size_t m = model.observation_count();
    const std::size_t width = n + 2;
    std::vector<double> delta((m + 1) * width, kLogZero);
    std::vector<StepKind> back((m + 1) * width, StepKind::Produce);
    auto cell = [&](std::size_t k, std::size_t i) { return k * width + i; };

    delta[cell(0, 1)] = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        for (std::size_t i = 1; i <= n + 1; ++i) {
            if (k == 0 && i == 1) continue;
            double best = kLogZero;
            StepKind arg = StepKind::Produce;
            bool found = false;
            auto offer = [&](double w, StepKind kind) {
                const bool better =
                    !found || (best == kLogZero ? w > best : w - best > kTieSlack * std::abs(best));
                if (better) {
                    best = w;
                    arg = kind;
                    found = true;
                }
            };
            if (k > 0 && i > 1)
                offer(delta[cell(k - 1, i - 1)] + model.log_produce(i - 1, k - 1), StepKind::Produce);
            if (i > 1) offer(delta[cell(k, i - 1)] + model.log_delete(i - 1), StepKind::Delete);
            if (k > 0) offer(delta[cell(k - 1, i)] + model.log_insert(k - 1), StepKind::Insert);
            delta[cell(k, i)] = best;
            back[cell(k, i)] = arg;
        }
    }

    LatticePath path;
    path.log_probability = delta[cell(m, n + 1)] + model.log_exit();
    std::size_t k = m, i = n + 1;
    while (k > 0 || i > 1) {
        switch (back[cell(k, i)]) {
            case StepKind::Produce:
                path.steps.push_back({StepKind::Produce, i - 1, k - 1});
                --k;
                --i;
                break;
            case StepKind::Delete:
                path.steps.push_back({StepKind::Delete, i - 1, 0});
                --i;
                break;
            case StepKind::Insert:
                path.steps.push_back({StepKind::Insert, 0, k - 1});
                --k;
                break;
        }
    }
    std::reverse(path.steps.begin(), path.steps.end());
    return path;
}

/// Sum of arc weights along an explicit step sequence, including the exit.
template <LatticeModel M>
double path_log_weight(const M& model, const std::vector<LatticeStep>& steps) {
    double w = 0.0;
    for (const auto& s : steps) {
        switch (s.kind) {
            case StepKind::Produce: w += model.log_produce(s.phoneme, s.observation); break;
            case StepKind::Delete: w += model.log_delete(s.phoneme); break;
            case StepKind::Insert: w += model.log_insert(s.observation); break;
        }
    }
    return w + model.log_exit();
}

}  // namespace accent
