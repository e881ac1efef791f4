#include "sce/dk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sce/nelder_mead.hpp"

namespace sce {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Deterministic start table as (theta/Gamma, alpha, xi/sigma^2).
constexpr int kStarts = 8;
constexpr double kStartTable[kStarts][3] = {
    {1.00, 1.00, 1.00}, {1.00, 0.80, 0.50}, {0.50, 1.00, 1.00}, {1.00, 1.20, 2.00},
    {0.70, 0.90, 0.80}, {1.00, 1.00, 0.50}, {0.30, 1.00, 1.00}, {1.00, 0.60, 1.00},
};

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    double theta = 0.0, alpha = 1.0, xi = 1.0;
    int start = 0;
    bool constrained = false;
};

bool better(const Candidate& a, const Candidate& b) {
    return a.value < b.value || (a.value == b.value && a.start < b.start);
}

}  // namespace

double dk_objective(const GaussianJointParams& p, double rate, const PowerBudget& pb,
                    const Channel& ch) {
    (void)pb;
    const GaussianInputLaw input(p.theta);
    const GaussianTestChannel tc(p.alpha, p.xi);
    return positive_part(rate - gaussian_mutual_information(input, tc))
           + gaussian_conditional_divergence(input, tc, ch);
}

DkMinimum g_dk_full(double rate, const PowerBudget& pb, const Channel& ch) {
    if (!(rate > 0.0)) throw std::domain_error("g_dk: rate must be > 0");
    const double gamma = pb.gamma;
    const double s2 = ch.noise_variance;
    const double expm1_2r = std::expm1(2.0 * rate);

    auto true_value = [&](double theta, double alpha, double xi) {
        theta = clamp(theta, 0.0, gamma);
        if (!(xi > 0.0)) return std::numeric_limits<double>::infinity();
        return dk_objective(GaussianJointParams(theta, alpha, xi), rate, pb, ch);
    };

    std::vector<Candidate> results(2 * kStarts);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < 2 * kStarts; ++s) {
        const int k = s % kStarts;
        const double th0 = kStartTable[k][0] * gamma;
        const double al0 = kStartTable[k][1];
        const double xi0 = kStartTable[k][2] * s2;
        Candidate cand;
        cand.start = s;
        if (s < kStarts) {
            // Constrained branch: on the I = R surface the kink vanishes and
            // the objective reduces to the divergence alone.
            auto f = [&](const std::vector<double>& p) {
                const double theta = p[0], alpha = p[1];
                if (theta < 0.0 || theta > gamma) {
                    const double over = theta < 0.0 ? -theta : theta - gamma;
                    return 1e3 * (1.0 + over * over);
                }
                const double xi = alpha * alpha * theta / expm1_2r;
                if (!(xi > 1e-300)) return 1e3;
                return gaussian_conditional_divergence(GaussianInputLaw(theta),
                                                       GaussianTestChannel(alpha, xi), ch);
            };
            const NelderMeadResult nm = nelder_mead(f, {th0, al0}, 0.15 * std::max(gamma, 1.0));
            const double theta = clamp(nm.x[0], 1e-12, gamma);
            const double alpha = nm.x[1];
            const double xi = alpha * alpha * theta / expm1_2r;
            if (xi > 0.0) {
                cand.value = true_value(theta, alpha, xi);
                cand.theta = clamp(theta, 0.0, gamma);
                cand.alpha = alpha;
                cand.xi = xi;
                cand.constrained = true;
            }
        } else {
            // Free branch: the full kinked objective over (theta, alpha, ln xi).
            auto f = [&](const std::vector<double>& p) {
                const double theta = p[0], alpha = p[1];
                const double lxi = clamp(p[2], -60.0, 60.0);
                double penalty = 0.0;
                double th = theta;
                if (th < 0.0) {
                    penalty = 10.0 * th * th;
                    th = 0.0;
                } else if (th > gamma) {
                    penalty = 10.0 * (th - gamma) * (th - gamma);
                    th = gamma;
                }
                return true_value(th, alpha, std::exp(lxi)) + penalty;
            };
            const NelderMeadResult nm = nelder_mead(f, {th0, al0, std::log(xi0)},
                                                    0.15 * std::max(gamma, 1.0));
            const double theta = clamp(nm.x[0], 0.0, gamma);
            const double xi = std::exp(clamp(nm.x[2], -60.0, 60.0));
            cand.value = true_value(theta, nm.x[1], xi);
            cand.theta = theta;
            cand.alpha = nm.x[1];
            cand.xi = xi;
        }
        // The start itself is a candidate; this pins the exact zero at the
        // true channel when R <= C.
        const double v0 = true_value(th0, al0, xi0);
        if (v0 < cand.value) {
            cand.value = v0;
            cand.theta = th0;
            cand.alpha = al0;
            cand.xi = xi0;
            cand.constrained = false;
        }
        results[s] = cand;
    }

    Candidate best = results[0];
    for (const Candidate& c : results)
        if (better(c, best)) best = c;
    return DkMinimum{best.value, GaussianJointParams(best.theta, best.alpha, best.xi),
                     best.start, best.constrained};
}

double g_dk(double rate, const PowerBudget& pb, const Channel& ch) {
    return g_dk_full(rate, pb, ch).value;
}

namespace {

// Shared driver for the two Lagrangian objectives: minimize over
// (ln theta, alpha, ln xi) with theta unconstrained above.
double minimize_lagrangian(const std::function<double(double, double, double)>& objective,
                           const PowerBudget& pb, const Channel& ch) {
    const double gamma = pb.gamma;
    const double s2 = ch.noise_variance;
    auto f = [&](const std::vector<double>& p) {
        const double theta = std::exp(clamp(p[0], -40.0, 40.0));
        const double xi = std::exp(clamp(p[2], -60.0, 60.0));
        return objective(theta, p[1], xi);
    };
    std::vector<Candidate> results(kStarts);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < kStarts; ++s) {
        const double th0 = std::max(kStartTable[s][0] * gamma, 1e-3);
        const std::vector<double> start{std::log(th0), kStartTable[s][1],
                                        std::log(kStartTable[s][2] * s2)};
        const NelderMeadResult nm = nelder_mead(f, start, 0.2);
        Candidate cand;
        cand.value = nm.value;
        cand.theta = std::exp(clamp(nm.x[0], -40.0, 40.0));
        cand.alpha = nm.x[1];
        cand.xi = std::exp(clamp(nm.x[2], -60.0, 60.0));
        cand.start = s;
        results[s] = cand;
    }
    Candidate best = results[0];
    for (const Candidate& c : results)
        if (better(c, best)) best = c;
    return best.value;
}

}  // namespace

double g_dk_mu(double mu, double rate, const PowerBudget& pb, const Channel& ch) {
    if (!(mu >= 0.0)) throw std::domain_error("g_dk_mu: mu must be >= 0");
    const double gamma = pb.gamma;
    const double expm1_2r = std::expm1(2.0 * rate);

    // Kinked branch over the full space.
    const double free_min = minimize_lagrangian(
        [&](double theta, double alpha, double xi) {
            return dk_objective(GaussianJointParams(theta, alpha, xi), rate, pb, ch)
                   - mu * (gamma - theta);
        },
        pb, ch);

    // I = R surface branch (divergence plus the power term only).
    auto surface = [&](const std::vector<double>& p) {
        const double theta = std::exp(clamp(p[0], -40.0, 40.0));
        const double alpha = p[1];
        const double xi = alpha * alpha * theta / expm1_2r;
        if (!(xi > 1e-300)) return 1e6;
        return gaussian_conditional_divergence(GaussianInputLaw(theta),
                                               GaussianTestChannel(alpha, xi), ch)
               - mu * (gamma - theta);
    };
    const NelderMeadResult nm = nelder_mead(surface, {std::log(std::max(gamma, 1e-3)), 1.0}, 0.2);
    return std::min(free_min, nm.value);
}

DkMuLambdaArg g_dk_mu_lambda_full(double mu, double lambda, double rate, const PowerBudget& pb,
                                  const Channel& ch) {
    if (!(mu >= 0.0)) throw std::domain_error("g_dk_mu_lambda: mu must be >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::domain_error("g_dk_mu_lambda: lambda must be in [0,1]");
    const double gamma = pb.gamma;

    double best_theta = gamma, best_alpha = 1.0, best_xi = ch.noise_variance;
    double best = std::numeric_limits<double>::infinity();
    auto objective = [&](double theta, double alpha, double xi) {
        const GaussianInputLaw input(theta);
        const GaussianTestChannel tc(alpha, xi);
        return lambda * (rate - gaussian_mutual_information(input, tc)) - mu * gamma
               + mu * theta + gaussian_conditional_divergence(input, tc, ch);
    };

    const double s2 = ch.noise_variance;
    auto f = [&](const std::vector<double>& p) {
        const double theta = std::exp(clamp(p[0], -40.0, 40.0));
        const double xi = std::exp(clamp(p[2], -60.0, 60.0));
        return objective(theta, p[1], xi);
    };
    std::vector<Candidate> results(kStarts);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < kStarts; ++s) {
        const double th0 = std::max(kStartTable[s][0] * gamma, 1e-3);
        const std::vector<double> start{std::log(th0), kStartTable[s][1],
                                        std::log(kStartTable[s][2] * s2)};
        const NelderMeadResult nm = nelder_mead(f, start, 0.2);
        Candidate cand;
        cand.value = nm.value;
        cand.theta = std::exp(clamp(nm.x[0], -40.0, 40.0));
        cand.alpha = nm.x[1];
        cand.xi = std::exp(clamp(nm.x[2], -60.0, 60.0));
        cand.start = s;
        results[s] = cand;
    }
    Candidate bc = results[0];
    for (const Candidate& c : results)
        if (better(c, bc)) bc = c;
    best = bc.value;
    best_theta = bc.theta;
    best_alpha = bc.alpha;
    best_xi = bc.xi;
    return DkMuLambdaArg{best, GaussianJointParams(best_theta, best_alpha, best_xi)};
}

double g_dk_mu_lambda(double mu, double lambda, double rate, const PowerBudget& pb,
                      const Channel& ch) {
    return g_dk_mu_lambda_full(mu, lambda, rate, pb, ch).value;
}

}  // namespace sce
