#include "sce/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sce {

double zeta(const TiltParams& tp, double eta, const Channel& ch) {
    if (!(eta >= 0.0)) throw std::domain_error("zeta: eta must be >= 0");
    const double rho = tp.lambda / (1.0 + tp.lambda);
    const double arg = 1.0 - rho * 2.0 * tp.mu * eta;
    if (!(arg > 0.0)) throw std::domain_error("zeta: 1 - (lambda/(1+lambda)) 2 mu eta <= 0");
    return 0.5 * tp.lambda * std::log1p(eta / ch.noise_variance) + 0.5 * std::log(arg);
}

double big_l_mu_lambda(const TiltParams& tp, double rate, const PowerBudget& pb,
                       const Channel& ch) {
    if (!(tp.mu > 0.0)) throw std::domain_error("big_l_mu_lambda: mu must be > 0");
    const double s2 = ch.noise_variance;
    const double lam = tp.lambda;
    const double rho = lam / (1.0 + lam);
    const double rate_term = rho * (rate - tp.mu * pb.gamma);
    const double log1_arg = rho + 1.0 / (2.0 * s2 * tp.mu);
    const double log2_arg = (1.0 / (1.0 + lam)) * (1.0 + 2.0 * tp.mu * lam * s2 / (1.0 + lam));
    return rate_term - 0.5 * rho * std::log(log1_arg)
           - 0.5 * (1.0 / (1.0 + lam)) * std::log(log2_arg);
}

RhoNuParams rho_nu_from_mu_lambda(const TiltParams& tp, const Channel& ch) {
    const double rho = tp.lambda / (1.0 + tp.lambda);
    const double nu = rho * 2.0 * tp.mu * ch.noise_variance;
    return RhoNuParams(rho, nu);
}

TiltParams mu_lambda_from_rho_nu(const RhoNuParams& rn, const Channel& ch) {
    if (rn.rho == 0.0) {
        if (rn.nu > 0.0)
            throw std::domain_error("mu_lambda_from_rho_nu: undefined at rho = 0 with nu > 0");
        return TiltParams(0.0, 0.0);
    }
    const double lambda = rn.rho / (1.0 - rn.rho);
    const double mu = rn.nu / (2.0 * rn.rho * ch.noise_variance);
    return TiltParams(mu, lambda);
}

double big_l_rho_nu(const RhoNuParams& rn, double rate, const PowerBudget& pb,
                    const Channel& ch) {
    const double g = pb.gamma / ch.noise_variance;
    if (rn.nu == 0.0) {
        if (rn.rho == 0.0) return 0.0;
        return -std::numeric_limits<double>::infinity();
    }
    return rn.rho * rate - 0.5 * rn.nu * g - 0.5 * std::log1p(rn.nu)
           + 0.5 * rn.rho * std::log(rn.nu) + 0.5 * binary_entropy(rn.rho);
}

double nu_zero(const PowerBudget& pb, const Channel& ch) {
    const double q = ch.noise_variance / pb.gamma;
    return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * q));
}

namespace {

// R(nu) and its derivative; the map is strictly increasing on [0, nu0) and
// blows up at nu0.
double rate_of_nu(double nu, double g) {
    return 0.5 * std::log((1.0 + g * (1.0 + nu)) / (1.0 - g * nu * (1.0 + nu)));
}

double rate_of_nu_deriv(double nu, double g) {
    return 0.5 * (g / (1.0 + g * (1.0 + nu))
                  + g * (1.0 + 2.0 * nu) / (1.0 - g * nu * (1.0 + nu)));
}

double exponent_of_nu(double nu, double g) {
    // + 0.0 normalizes the signed zero at nu = 0
    return -0.5 * nu * g - 0.5 * std::log(1.0 - g * nu * (1.0 + nu)) + 0.0;
}

}  // namespace

ExponentPoint parametric_point(double nu, const PowerBudget& pb, const Channel& ch) {
    const double n0 = nu_zero(pb, ch);
    if (!(nu >= 0.0) || !(nu < n0))
        throw std::domain_error("parametric_point: nu must lie in [0, nu0)");
    const double g = pb.gamma / ch.noise_variance;
    return ExponentPoint{rate_of_nu(nu, g), exponent_of_nu(nu, g), nu};
}

RateSolve solve_rate(double rate, const PowerBudget& pb, const Channel& ch) {
    if (!(rate > 0.0)) throw std::domain_error("solve_rate: rate must be > 0");
    const double cap = capacity(ch, pb);
    if (rate <= cap) return RateSolve{0.0, 0.0, 0.0, true};

    const double g = pb.gamma / ch.noise_variance;
    const double n0 = nu_zero(pb, ch);
    double lo = 0.0;
    double hi = n0 * (1.0 - tol::kNuBracketShrink);
    if (rate_of_nu(hi, g) < rate)
        throw SolverError("solve_rate: rate beyond the representable curve");

    // Bisection to a rough bracket, then guarded Newton polish.
    double nu = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        nu = 0.5 * (lo + hi);
        const double r = rate_of_nu(nu, g);
        if (std::abs(r - rate) < tol::kRateSolve) break;
        (r < rate ? lo : hi) = nu;
        if (hi - lo < 1e-16 * n0) break;
    }
    for (int i = 0; i < 50; ++i) {
        const double r = rate_of_nu(nu, g);
        if (std::abs(r - rate) < tol::kRateSolve * 1e-3) break;
        double step = (r - rate) / rate_of_nu_deriv(nu, g);
        double next = nu - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // keep the bracket
        (rate_of_nu(next, g) < rate ? lo : hi) = next;
        nu = next;
    }
    if (std::abs(rate_of_nu(nu, g) - rate) > tol::kRateSolve)
        throw SolverError("solve_rate: rate inversion did not converge");

    const double rho = nu / (1.0 + nu) + nu * g;
    return RateSolve{exponent_of_nu(nu, g), nu, rho, false};
}

double exponent_at_rate(double rate, const PowerBudget& pb, const Channel& ch) {
    return solve_rate(rate, pb, ch).exponent;
}

FGradient f_gradient(const RhoNuParams& rn, double rate, const PowerBudget& pb,
                     const Channel& ch) {
    if (!(rn.nu > 0.0) || !(rn.rho > 0.0))
        throw std::domain_error("f_gradient: interior point required");
    const double g = pb.gamma / ch.noise_variance;
    const double d_rho = -rate - 0.5 * std::log(rn.nu) + 0.5 * std::log(rn.rho / (1.0 - rn.rho));
    const double d_nu = 0.5 * (g + 1.0 / (1.0 + rn.nu) - rn.rho / rn.nu);
    return FGradient{d_rho, d_nu};
}

FHessian f_hessian(const RhoNuParams& rn) {
    if (!(rn.nu > 0.0) || !(rn.rho > 0.0))
        throw std::domain_error("f_hessian: interior point required");
    const double rr = 0.5 / (rn.rho * (1.0 - rn.rho));
    const double rn_ = -0.5 / rn.nu;
    const double nn = 0.5 * (-1.0 / ((1.0 + rn.nu) * (1.0 + rn.nu)) + rn.rho / (rn.nu * rn.nu));
    return FHessian{rr, rn_, nn};
}

RhoNuParams stationary_point(double rate, const PowerBudget& pb, const Channel& ch) {
    const RateSolve s = solve_rate(rate, pb, ch);
    if (s.below_capacity)
        throw std::domain_error("stationary_point: rate must exceed capacity");
    return RhoNuParams(s.rho, s.nu);
}

namespace {

struct GridCell {
    double value = -std::numeric_limits<double>::infinity();
    double rho = 0.0;
    double nu = 0.0;
    long index = -1;
};

// Lexicographic (value, -index): larger value wins, ties go to the earlier cell.
inline bool better(const GridCell& a, const GridCell& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
}

}  // namespace

RhoNuOptimum optimize_rho_nu_full(double rate, const PowerBudget& pb, const Channel& ch) {
    const double g = pb.gamma / ch.noise_variance;
    const double n0 = nu_zero(pb, ch);
    const int n = tol::kGridNodes;

    // Coarse grid over the feasible cone. The origin cell carries the exact
    // nu = 0 limit, so rates at or below capacity resolve to 0.
    std::vector<GridCell> row_best(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double rho = static_cast<double>(i) / n * 0.999;
        GridCell best;
        for (int j = 0; j < n; ++j) {
            const double nu = static_cast<double>(j) / n * n0 * (1.0 - tol::kNuBracketShrink);
            if (rho < nu / (1.0 + nu)) break;  // rows are feasible up to this nu
            double value;
            if (nu == 0.0) {
                value = (rho == 0.0) ? 0.0 : -std::numeric_limits<double>::infinity();
            } else if (rho == 0.0) {
                value = -0.5 * nu * g - 0.5 * std::log1p(nu);
            } else {
                value = rho * rate - 0.5 * nu * g - 0.5 * std::log1p(nu)
                        + 0.5 * rho * std::log(nu) + 0.5 * binary_entropy(rho);
            }
            GridCell cell{value, rho, nu, static_cast<long>(i) * n + j};
            if (better(cell, best)) best = cell;
        }
        row_best[i] = best;
    }
    GridCell best;
    for (const GridCell& cell : row_best)
        if (better(cell, best)) best = cell;

    // 1-D refinement along the rho = nu/(1+nu) boundary (golden section), so
    // a boundary supremum would be detected rather than missed by the grid.
    {
        const double inv_phi = 0.6180339887498949;
        double a = 0.0, b = n0 * (1.0 - tol::kNuBracketShrink);
        auto boundary_l = [&](double nu) {
            if (nu <= 0.0) return 0.0;
            const RhoNuParams p(nu / (1.0 + nu), nu);
            return big_l_rho_nu(p, rate, pb, ch);
        };
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = boundary_l(c), fd = boundary_l(d);
        for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
            if (fc > fd) {
                b = d; d = c; fd = fc;
                c = b - inv_phi * (b - a); fc = boundary_l(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + inv_phi * (b - a); fd = boundary_l(d);
            }
        }
        const double nu_b = 0.5 * (a + b);
        const double val_b = boundary_l(nu_b);
        GridCell cell{val_b, nu_b / (1.0 + nu_b), nu_b, static_cast<long>(n) * n};
        if (better(cell, best)) best = cell;
    }

    // Damped Newton on the convex F = -L from the best interior cell.
    double rho = best.rho, nu = best.nu, value = best.value;
    int iters = 0;
    bool interior = rho > nu / (1.0 + nu) + 1e-12 && nu > 0.0 && rho > 0.0;
    if (interior) {
        for (; iters < tol::kNewtonMaxIter; ++iters) {
            const RhoNuParams p(rho, nu);
            const FGradient grad = f_gradient(p, rate, pb, ch);
            const FHessian hess = f_hessian(p);
            const double det = hess.det();
            if (std::abs(det) < 1e-18) break;
            double step_rho = (hess.d_nu_nu * grad.d_rho - hess.d_rho_nu * grad.d_nu) / det;
            double step_nu = (-hess.d_rho_nu * grad.d_rho + hess.d_rho_rho * grad.d_nu) / det;
            double t = 1.0;
            double next_rho = rho, next_nu = nu;
            while (t > 1e-14) {
                next_rho = rho - t * step_rho;
                next_nu = nu - t * step_nu;
                if (next_rho > 0.0 && next_rho < 1.0 && next_nu > 0.0 &&
                    next_rho >= next_nu / (1.0 + next_nu))
                    break;
                t *= 0.5;
            }
            if (t <= 1e-14) break;
            rho = next_rho;
            nu = next_nu;
            if (std::abs(grad.d_rho) + std::abs(grad.d_nu) < tol::kParam &&
                t * (std::abs(step_rho) + std::abs(step_nu)) < tol::kParam)
                break;
        }
        const double refined = big_l_rho_nu(RhoNuParams(rho, nu), rate, pb, ch);
        if (refined >= value) {
            value = refined;
        } else {
            rho = best.rho;
            nu = best.nu;
        }
        interior = rho > nu / (1.0 + nu) + 1e-9;
    }

    // The exact origin limit dominates below capacity.
    if (value < 0.0) return RhoNuOptimum{0.0, 0.0, 0.0, false, iters};
    return RhoNuOptimum{value, rho, nu, interior, iters};
}

double optimize_rho_nu(double rate, const PowerBudget& pb, const Channel& ch) {
    return optimize_rho_nu_full(rate, pb, ch).value;
}

}  // namespace sce
