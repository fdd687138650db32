#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "accent/error.hpp"

namespace accent {

/// rates[group][condition] holds one value per speaker.
using RateTable = std::array<std::array<std::vector<double>, 2>, 2>;

struct AnovaEffect {
    double sum_of_squares = 0.0;
    double df = 0.0;
    double f = 0.0;
    double p = 1.0;
};

struct AnovaResult {
    AnovaEffect group;        // speaker group (A vs B)
    AnovaEffect condition;    // before vs after learning
    AnovaEffect interaction;
    double error_ss = 0.0;
    double error_df = 0.0;
};

/// Two-way fixed-effects ANOVA on a balanced 2x2 layout with n values per
/// cell, giving df (1, 4(n - 1)) for each effect.
inline AnovaResult two_way_anova(const RateTable& rates) {
    const std::size_t n = rates[0][0].size();
    for (const auto& g : rates)
        for (const auto& cell : g)
            if (cell.size() != n) throw UnbalancedDesign("cells differ in size");
    if (n < 2) throw UnbalancedDesign("need at least two values per cell");

    double cell_mean[2][2];
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            double s = 0.0;
            for (double x : rates[a][b]) s += x;
            cell_mean[a][b] = s / static_cast<double>(n);
        }
    }
    const double row[2] = {(cell_mean[0][0] + cell_mean[0][1]) / 2.0,
                           (cell_mean[1][0] + cell_mean[1][1]) / 2.0};
    const double col[2] = {(cell_mean[0][0] + cell_mean[1][0]) / 2.0,
                           (cell_mean[0][1] + cell_mean[1][1]) / 2.0};
    // Averaging pairwise keeps a constant table exactly constant.
    const double grand = (row[0] + row[1]) / 2.0;

    const double dn = static_cast<double>(n);
    AnovaResult r;
    for (std::size_t a = 0; a < 2; ++a) {
        r.group.sum_of_squares += 2.0 * dn * (row[a] - grand) * (row[a] - grand);
        r.condition.sum_of_squares += 2.0 * dn * (col[a] - grand) * (col[a] - grand);
        for (std::size_t b = 0; b < 2; ++b) {
            const double inter = cell_mean[a][b] - row[a] - col[b] + grand;
            r.interaction.sum_of_squares += dn * inter * inter;
            for (double x : rates[a][b]) r.error_ss += (x - cell_mean[a][b]) * (x - cell_mean[a][b]);
        }
    }
    r.error_df = 4.0 * (dn - 1.0);
    const double mse = r.error_ss / r.error_df;
    for (AnovaEffect* e : {&r.group, &r.condition, &r.interaction}) {
        e->df = 1.0;
        if (e->sum_of_squares == 0.0) {
            e->f = 0.0;
            e->p = 1.0;
        } else if (mse == 0.0) {
            e->f = std::numeric_limits<double>::infinity();
            e->p = 0.0;
        } else {
            e->f = (e->sum_of_squares / e->df) / mse;
            boost::math::fisher_f dist(e->df, r.error_df);
            e->p = boost::math::cdf(boost::math::complement(dist, e->f));
        }
    }
    return r;
}

}  // namespace accent
