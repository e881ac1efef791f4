#pragma once

#include "sce/channel.hpp"
#include "sce/closed_form.hpp"
#include "sce/quadrature.hpp"

// Quadrature evaluation of the two tilted functionals behind the variational
// route: Omega over a (q_X, Q) pair and the nested J functional, the tilted
// output density minimizing Omega, the 1-D maximization of zeta over the test
// output variance, the saddle output check, and the grid-search exponent that
// ties them back to the closed forms. All integrand arithmetic is carried in
// log space with log-sum-exp reductions in fixed index order.

namespace sce {

// xi(mu, lambda, theta) = (1+lambda) theta / (1 + 2 mu lambda theta)
inline double xi_of_theta(const TiltParams& tp, double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("xi_of_theta: theta must be >= 0");
    return (1.0 + tp.lambda) * theta / (1.0 + 2.0 * tp.mu * tp.lambda * theta);
}

// Output integration grid used by the nested functionals: the input support
// widened by the noise spread at the same truncation level.
Grid1D output_grid(const DiscretizedDensity& qx, const Channel& ch, const QuadratureSpec& spec);

// log iint dx dy q_X(x) e^{-(1+lambda)(y-x)^2/(2 sigma^2)} e^{-mu lambda x^2}
//           / [ (2 pi sigma^2)^{(1+lambda)/2} Q^lambda(y) ]
// q_out must be strictly positive on its grid.
double omega(const DiscretizedDensity& qx, const DiscretizedDensity& q_out,
             const TiltParams& tp, const Channel& ch);

// J^(mu,lambda)(q_X | sigma^2) for lambda in [0,1): the nested two-level
// quadrature; the output integration grid is synthesized from q_X's support
// widened by the tilt-inflated noise spread, with `spec` controlling node
// count and truncation.
double j_functional(const DiscretizedDensity& qx, const TiltParams& tp_ar, const Channel& ch,
                    const QuadratureSpec& spec = {});

struct TiltedOutput {
    DiscretizedDensity density;
    double log_normalizer;  // ln kappa^{-1}; equals J^(mu, lambda/(1+lambda))(q_X)
};

// The Q minimizing Omega for fixed q_X:
//   Q(y) = kappa [ int q_X(x) p_N^{1+lambda}(y-x) e^{-mu lambda x^2} dx ]^{1/(1+lambda)}
TiltedOutput optimal_tilted_output_full(const DiscretizedDensity& qx, const TiltParams& tp,
                                        const Channel& ch, const QuadratureSpec& spec = {});
DiscretizedDensity optimal_tilted_output(const DiscretizedDensity& qx, const TiltParams& tp,
                                         const Channel& ch, const QuadratureSpec& spec = {});

// min_Q Omega(q_X, Q) = Omega(q_X, Q*) with Q* the tilted output; equals
// (1+lambda) J^(mu, lambda/(1+lambda))(q_X).
double min_omega_over_q(const DiscretizedDensity& qx, const TiltParams& tp, const Channel& ch,
                        const QuadratureSpec& spec = {});

struct UnderlineOmega {
    double value;
    double xi_hat;  // argmax of zeta over [0, (1+lambda)/(2 mu lambda))
};

// Golden-section maximization of zeta over the admissible output variance.
UnderlineOmega underline_omega(const TiltParams& tp, const Channel& ch);

// Omega(q_X, N(0, eta + sigma^2)) with eta = 1/(2 mu) - sigma^2/(1+lambda).
// Equal to zeta(eta) for every q_X; requires mu in (0, (1+lambda)/(2 sigma^2)].
double saddle_value(const DiscretizedDensity& qx, const TiltParams& tp, const Channel& ch,
                    const QuadratureSpec& spec = {});

struct GohGrid {
    int rho_nodes = 96;
    int mu_nodes = 96;
    int refine_rounds = 4;
    double rho_max = 0.995;
};

struct GohResult {
    double value;
    double mu;
    double lambda;
};

// sup over mu in [0,(1+lambda)/(2 sigma^2)], lambda >= 0 of
//   [lambda (R - mu Gamma) - underline_omega(mu,lambda)] / (1+lambda),
// by iteratively refined grid search (lambda swept through rho = lambda/(1+lambda)).
GohResult g_oh_numeric(double rate, const PowerBudget& pb, const Channel& ch,
                       const GohGrid& grid = {});

namespace detail {
// Serial reference for the parallel Omega kernel; identical math, plain loops.
double omega_serial(const DiscretizedDensity& qx, const DiscretizedDensity& q_out,
                    const TiltParams& tp, const Channel& ch);
}  // namespace detail

}  // namespace sce
