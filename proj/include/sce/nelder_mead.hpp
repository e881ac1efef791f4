#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <vector>

// Compact deterministic Nelder-Mead for the low-dimensional minimizations in
// this project. Standard coefficients, fixed tie-breaking by vertex index.

namespace sce {

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    int iterations;
    bool converged;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, double step = 0.25,
                                    double ftol = 1e-14, double xtol = 1e-12,
                                    int max_iter = 4000) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> simplex(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> fx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fx[i] = f(simplex[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> s2(dim + 1);
        std::vector<double> f2(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fx[idx[i]];
        }
        simplex.swap(s2);
        fx.swap(f2);
    };

    int it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        order();
        double spread_f = fx[dim] - fx[0];
        double spread_x = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            spread_x = std::max(spread_x, std::abs(simplex[dim][i] - simplex[0][i]));
        if (spread_f < ftol && spread_x < xtol) {
            converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t v = 0; v < dim; ++v) centroid[i] += simplex[v][i];
            centroid[i] /= static_cast<double>(dim);
        }
        auto blend = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i)
                p[i] = centroid[i] + t * (simplex[dim][i] - centroid[i]);
            return p;
        };

        const std::vector<double> refl = blend(-1.0);
        const double f_refl = f(refl);
        if (f_refl < fx[0]) {
            const std::vector<double> expd = blend(-2.0);
            const double f_expd = f(expd);
            if (f_expd < f_refl) {
                simplex[dim] = expd;
                fx[dim] = f_expd;
            } else {
                simplex[dim] = refl;
                fx[dim] = f_refl;
            }
        } else if (f_refl < fx[dim - 1]) {
            simplex[dim] = refl;
            fx[dim] = f_refl;
        } else {
            const bool outside = f_refl < fx[dim];
            const std::vector<double> ctr = blend(outside ? -0.5 : 0.5);
            const double f_ctr = f(ctr);
            if (f_ctr < std::min(f_refl, fx[dim])) {
                simplex[dim] = ctr;
                fx[dim] = f_ctr;
            } else {
                for (std::size_t v = 1; v <= dim; ++v) {  // shrink toward the best vertex
                    for (std::size_t i = 0; i < dim; ++i)
                        simplex[v][i] = simplex[0][i] + 0.5 * (simplex[v][i] - simplex[0][i]);
                    fx[v] = f(simplex[v]);
                }
            }
        }
    }
    order();
    return NelderMeadResult{simplex[0], fx[0], it, converged};
}

}  // namespace sce
