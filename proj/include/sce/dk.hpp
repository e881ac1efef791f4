#pragma once

#include "sce/channel.hpp"
#include "sce/closed_form.hpp"

// Exponent as a minimization over Gaussian input / test-channel pairs:
//   min over (theta <= Gamma, alpha, xi) of [R - I]^+ + D,
// plus the Lagrangian variants that release the power constraint through mu
// and linearize the positive part through lambda in [0,1].

namespace sce {

// Zero-mean jointly Gaussian pair (X, Y = alpha X + S), S ~ N(0, xi).
struct GaussianJointParams {
    double theta;  // input variance, >= 0
    double alpha;
    double xi;  // test noise variance, > 0

    GaussianJointParams(double t, double a, double x) : theta(t), alpha(a), xi(x) {
        if (!(t >= 0.0)) throw std::invalid_argument("GaussianJointParams: theta must be >= 0");
        if (!(x > 0.0)) throw std::invalid_argument("GaussianJointParams: xi must be > 0");
    }
};

// [R - I(theta,alpha,xi)]^+ + D(theta,alpha,xi || W)
double dk_objective(const GaussianJointParams& p, double rate, const PowerBudget& pb,
                    const Channel& ch);

struct DkMinimum {
    double value;
    GaussianJointParams argmin;
    int winning_start;        // index into the deterministic start table
    bool constrained_branch;  // true when the I = R surface branch won
};

// min over theta in [0, Gamma], alpha, xi > 0 of dk_objective. Multi-start
// Nelder-Mead over both branches of the positive-part kink; the winner is
// picked by (value, start index) so concurrent starts reduce deterministically.
DkMinimum g_dk_full(double rate, const PowerBudget& pb, const Channel& ch);
double g_dk(double rate, const PowerBudget& pb, const Channel& ch);

// min over unconstrained theta >= 0 of [R - I]^+ + D - mu (Gamma - theta).
double g_dk_mu(double mu, double rate, const PowerBudget& pb, const Channel& ch);

// min over theta >= 0 of lambda [R - I] - mu Gamma + mu theta + D, lambda in [0,1].
double g_dk_mu_lambda(double mu, double lambda, double rate, const PowerBudget& pb,
                      const Channel& ch);

struct DkMuLambdaArg {
    double value;
    GaussianJointParams argmin;
};
DkMuLambdaArg g_dk_mu_lambda_full(double mu, double lambda, double rate, const PowerBudget& pb,
                                  const Channel& ch);

}  // namespace sce
