#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace sce {

// log(sum_i exp(terms[i])), reduced in index order after a max scan, so the
// result is independent of how the terms were produced (serial or parallel).
inline double log_sum_exp(std::span<const double> terms) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double max_term = neg_inf;
    for (double t : terms) max_term = std::max(max_term, t);
    if (max_term == neg_inf) return neg_inf;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

}  // namespace sce
