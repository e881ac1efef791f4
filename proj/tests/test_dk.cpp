#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sce/dk.hpp"

using namespace sce;

namespace {
const Channel kUnitChannel(1.0);
const PowerBudget kUnitPower(1.0);
constexpr double kRateAtNu03 = 0.66360272237494206;
constexpr double kExpAtNu03 = 0.09714816090739006;
}  // namespace

TEST_CASE("dk objective closed-form values") {
    const double cap = capacity(kUnitChannel, kUnitPower);
    CHECK(dk_objective(GaussianJointParams(1.0, 1.0, 1.0), cap, kUnitPower, kUnitChannel) ==
          0.0);
    CHECK(dk_objective(GaussianJointParams(1.0, 1.0, 1.0), cap + 0.2, kUnitPower,
                       kUnitChannel) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(dk_objective(GaussianJointParams(1.0, 0.5, 1.0), 1.0, kUnitPower, kUnitChannel) ==
          doctest::Approx(1.0134282243428951).epsilon(1e-14));
}

TEST_CASE("g_dk hits zero at capacity and matches the parametric route above") {
    const double cap = capacity(kUnitChannel, kUnitPower);
    CHECK(g_dk(cap, kUnitPower, kUnitChannel) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(g_dk(kRateAtNu03, kUnitPower, kUnitChannel) - kExpAtNu03) < 1e-6);
    CHECK(std::abs(g_dk(1.0, kUnitPower, kUnitChannel) -
                   exponent_at_rate(1.0, kUnitPower, kUnitChannel)) < 1e-6);
    // other power ratios
    for (double ratio : {0.25, 4.0}) {
        const PowerBudget pb(ratio);
        const double rate = capacity(kUnitChannel, pb) + 0.5;
        CHECK(std::abs(g_dk(rate, pb, kUnitChannel) - exponent_at_rate(rate, pb, kUnitChannel)) <
              1e-6);
    }
}

TEST_CASE("g_dk is zero below capacity and increasing above") {
    const double cap = capacity(kUnitChannel, kUnitPower);
    CHECK(g_dk(0.5 * cap, kUnitPower, kUnitChannel) == doctest::Approx(0.0).epsilon(1e-10));
    double prev = -1.0;
    for (double rate = cap + 0.1; rate < cap + 1.0; rate += 0.2) {
        const double v = g_dk(rate, kUnitPower, kUnitChannel);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("dk minimizer structure at the worked point") {
    const DkMinimum m = g_dk_full(kRateAtNu03, kUnitPower, kUnitChannel);
    const GaussianInputLaw input(m.argmin.theta);
    const GaussianTestChannel tc(m.argmin.alpha, m.argmin.xi);
    CHECK(gaussian_mutual_information(input, tc) <= kRateAtNu03 + 1e-6);
    CHECK(gaussian_conditional_divergence(input, tc, kUnitChannel) > 0.0);

    // coordinate-wise perturbations do not improve the objective
    const double base = dk_objective(m.argmin, kRateAtNu03, kUnitPower, kUnitChannel);
    for (int coord = 0; coord < 3; ++coord) {
        for (double sign : {-1.0, 1.0}) {
            GaussianJointParams p = m.argmin;
            if (coord == 0) p.theta = std::clamp(p.theta + sign * 1e-3, 0.0, kUnitPower.gamma);
            if (coord == 1) p.alpha += sign * 1e-3;
            if (coord == 2) p.xi = std::max(1e-9, p.xi + sign * 1e-3);
            CHECK(dk_objective(p, kRateAtNu03, kUnitPower, kUnitChannel) >= base - 1e-8);
        }
    }
}

TEST_CASE("dk objective agrees with Monte Carlo oracle at the found minimizer") {
    const DkMinimum m = g_dk_full(kRateAtNu03, kUnitPower, kUnitChannel);
    const auto mi = oracles::mc_mutual_information(m.argmin.theta, m.argmin.alpha, m.argmin.xi,
                                                   400000, 61);
    const auto dv = oracles::mc_conditional_divergence(m.argmin.theta, m.argmin.alpha,
                                                       m.argmin.xi, 1.0, 400000, 67);
    const double closed_i =
        gaussian_mutual_information(GaussianInputLaw(m.argmin.theta),
                                    GaussianTestChannel(m.argmin.alpha, m.argmin.xi));
    const double closed_d = gaussian_conditional_divergence(
        GaussianInputLaw(m.argmin.theta), GaussianTestChannel(m.argmin.alpha, m.argmin.xi),
        kUnitChannel);
    CHECK(std::abs(mi.mean - closed_i) < 3.0 * mi.std_err);
    CHECK(std::abs(dv.mean - closed_d) < 3.0 * dv.std_err);
}

TEST_CASE("lagrangian mu form: max over mu recovers g_dk") {
    for (double rate : {0.46, 0.66, 0.86, 1.06, 1.26}) {
        const double direct = g_dk(rate, kUnitPower, kUnitChannel);
        double best = -1e300;
        for (double mu = 0.0; mu <= 1.2; mu += 0.01) {
            best = std::max(best, g_dk_mu(mu, rate, kUnitPower, kUnitChannel));
        }
        CHECK(std::abs(best - direct) < 1e-4);
    }
}

TEST_CASE("lagrangian (mu,lambda) form") {
    // at lambda = 0 the true channel is feasible, so the min is <= 0 for every mu
    for (double mu = 0.0; mu <= 2.0; mu += 0.25)
        CHECK(g_dk_mu_lambda(mu, 0.0, 1.0, kUnitPower, kUnitChannel) <= 1e-10);
    CHECK_THROWS_AS(g_dk_mu_lambda(0.5, 1.5, 1.0, kUnitPower, kUnitChannel), std::domain_error);

    // the theoretical maximizer (mu, lambda) = (nu rho / (2 rho sigma^2) * ..., rho*)
    // reduces to mu = 0.15, lambda = rho* at the worked point
    const double v =
        g_dk_mu_lambda(0.15, 0.53076923076923077, kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(std::abs(v - kExpAtNu03) < 1e-6);

    // grid max over (mu, lambda in [0,1]) reaches the exponent
    double best = -1e300;
    double best_lambda = -1.0;
    for (double lambda = 0.0; lambda <= 1.0; lambda += 0.05) {
        for (double mu = 0.0; mu <= 0.6; mu += 0.025) {
            const double g = g_dk_mu_lambda(mu, lambda, kRateAtNu03, kUnitPower, kUnitChannel);
            if (g > best) {
                best = g;
                best_lambda = lambda;
            }
        }
    }
    CHECK(std::abs(best - kExpAtNu03) < 1e-3);
    CHECK(best_lambda > 0.0);  // interior in lambda at this rate
    CHECK(best_lambda < 1.0);
}

TEST_CASE("complementary slackness: the maximizing mu saturates the power") {
    // at the theoretical maximizing mu the unconstrained minimizer uses theta ~ Gamma
    const DkMuLambdaArg arg =
        g_dk_mu_lambda_full(0.15, 0.53076923076923077, kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(std::abs(arg.argmin.theta - kUnitPower.gamma) < 1e-3);
}
