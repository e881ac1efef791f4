#pragma once

#include <limits>
#include <stdexcept>

#include "sce/channel.hpp"

// Closed-form side of the exponent: the zeta and L functionals in both the
// (mu,lambda) and (rho,nu) parameterizations, the nu0 root, the parametric
// rate/exponent curve, rate inversion, and a convex solver over the feasible
// (rho,nu) cone with analytic gradient and Hessian.

namespace sce {

// Every tolerance used by the solvers in this module, in one place.
namespace tol {
inline constexpr double kRateSolve = 1e-10;       // |R(nu) - R| at convergence
inline constexpr double kParam = 1e-8;            // parameter-space step / gradient norm
inline constexpr double kNuBracketShrink = 1e-9;  // bracket end: nu0*(1 - shrink)
inline constexpr int kGridNodes = 200;            // coarse grid per axis in optimize_rho_nu
inline constexpr int kNewtonMaxIter = 100;
}  // namespace tol

// Thrown when an iterative solver fails to reach its tolerance (CLI exit 3).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lagrange/tilting pair (mu, lambda), both >= 0.
struct TiltParams {
    double mu;
    double lambda;

    TiltParams(double m, double l) : mu(m), lambda(l) {
        if (!(m >= 0.0) || !(l >= 0.0))
            throw std::invalid_argument("TiltParams: mu and lambda must be >= 0");
    }
};

// Reparameterization rho = lambda/(1+lambda), nu = 2*lambda*mu*sigma^2/(1+lambda).
// Feasible region: 0 <= nu/(1+nu) <= rho < 1.
struct RhoNuParams {
    double rho;
    double nu;

    RhoNuParams(double r, double n) : rho(r), nu(n) {
        if (!(n >= 0.0) || !(r >= 0.0) || !(r < 1.0) || r < n / (1.0 + n))
            throw std::domain_error("RhoNuParams: need 0 <= nu/(1+nu) <= rho < 1");
    }
};

// One point of the parametric exponent curve.
struct ExponentPoint {
    double rate;      // R(nu), nats
    double exponent;  // G(nu), nats
    double nu;        // parameter that generated the point
};

// Result of inverting the rate map at a given R.
struct RateSolve {
    double exponent;
    double nu;
    double rho;
    bool below_capacity;
};

// Gradient of F = -L^(rho,nu) at an interior feasible point.
struct FGradient {
    double d_rho;
    double d_nu;
};

// Hessian of F; symmetric 2x2.
struct FHessian {
    double d_rho_rho;
    double d_rho_nu;
    double d_nu_nu;

    double det() const { return d_rho_rho * d_nu_nu - d_rho_nu * d_rho_nu; }
};

// Outcome of the grid-then-Newton maximization of L over the feasible cone.
struct RhoNuOptimum {
    double value;
    double rho;
    double nu;
    bool interior;  // false when the nu/(1+nu) boundary (or the origin) won
    int newton_iterations;
};

// zeta^(mu,lambda)(eta | sigma^2) =
//   (lambda/2) ln(1 + eta/sigma^2) + (1/2) ln(1 - (lambda/(1+lambda)) 2 mu eta)
double zeta(const TiltParams& tp, double eta, const Channel& ch);

// L^(mu,lambda)(R, Gamma | sigma^2), evaluated through the expanded two-log
// form, which stays defined where the zeta route would need eta < 0.
double big_l_mu_lambda(const TiltParams& tp, double rate, const PowerBudget& pb,
                       const Channel& ch);

RhoNuParams rho_nu_from_mu_lambda(const TiltParams& tp, const Channel& ch);
TiltParams mu_lambda_from_rho_nu(const RhoNuParams& rn, const Channel& ch);

// L^(rho,nu)(R, Gamma | sigma^2) =
//   rho R - (nu/2) Gamma/sigma^2 - (1/2) ln(1+nu) + (rho/2) ln nu + (1/2) h(rho)
// At nu = 0 the (rho/2) ln nu term forces -infinity unless rho = 0, where the
// continuous limit is 0; -infinity is returned as a sentinel, never NaN.
double big_l_rho_nu(const RhoNuParams& rn, double rate, const PowerBudget& pb,
                    const Channel& ch);

// Unique positive root of nu0 (1 + nu0) = sigma^2 / Gamma.
double nu_zero(const PowerBudget& pb, const Channel& ch);

// The parametric curve of the exponent function, defined for 0 <= nu < nu0.
ExponentPoint parametric_point(double nu, const PowerBudget& pb, const Channel& ch);

// Inversion of the rate map: exponent at a given rate (0 below capacity).
RateSolve solve_rate(double rate, const PowerBudget& pb, const Channel& ch);
double exponent_at_rate(double rate, const PowerBudget& pb, const Channel& ch);

// Analytic first and second derivatives of F = -L^(rho,nu).
FGradient f_gradient(const RhoNuParams& rn, double rate, const PowerBudget& pb,
                     const Channel& ch);
FHessian f_hessian(const RhoNuParams& rn);

// Stationary point of F for R above capacity:
//   rho* = nu*/(1+nu*) + nu* Gamma/sigma^2, with nu* from the rate inversion.
RhoNuParams stationary_point(double rate, const PowerBudget& pb, const Channel& ch);

// Direct numeric maximization of L over the feasible cone: coarse grid, then
// damped Newton on the convex F, plus a 1-D search along the rho = nu/(1+nu)
// boundary. Grid rows may be evaluated concurrently; the reduction order is
// fixed so the result does not depend on the thread count.
RhoNuOptimum optimize_rho_nu_full(double rate, const PowerBudget& pb, const Channel& ch);
double optimize_rho_nu(double rate, const PowerBudget& pb, const Channel& ch);

}  // namespace sce
