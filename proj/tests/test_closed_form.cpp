#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sce/closed_form.hpp"
#include "sce/rng.hpp"

using namespace sce;

namespace {
const Channel kUnitChannel(1.0);
const PowerBudget kUnitPower(1.0);

// The worked point nu = 0.3 at Gamma = sigma^2 = 1, frozen from a
// high-precision evaluation of the parametric display.
constexpr double kRateAtNu03 = 0.66360272237494206;
constexpr double kExpAtNu03 = 0.09714816090739006;
constexpr double kRhoStarAtNu03 = 0.53076923076923077;

RhoNuParams random_feasible(StreamRng& rng) {
    // interior of the cone: rho in (nu/(1+nu), 1)
    const double nu = 0.02 + 2.0 * rng.next_unit();
    const double lo = nu / (1.0 + nu);
    const double rho = lo + (0.995 - lo) * (0.02 + 0.96 * rng.next_unit());
    return RhoNuParams(rho, nu);
}
}  // namespace

TEST_CASE("zeta closed form and domain") {
    CHECK(zeta(TiltParams(0.7, 2.0), 0.0, kUnitChannel) == 0.0);
    CHECK(zeta(TiltParams(0.3, 0.0), 1.7, kUnitChannel) == 0.0);
    CHECK(zeta(TiltParams(0.5, 1.0), 0.5, kUnitChannel) ==
          doctest::Approx(0.058891517828191727).epsilon(1e-14));
    // second log argument nonpositive
    CHECK_THROWS_AS(zeta(TiltParams(2.0, 1.0), 1.0, kUnitChannel), std::domain_error);
    CHECK_THROWS_AS(zeta(TiltParams(0.5, 1.0), -0.1, kUnitChannel), std::domain_error);
}

TEST_CASE("big_l_mu_lambda matches big_l_rho_nu across the feasible region") {
    StreamRng rng(101, 0);
    for (int i = 0; i < 100; ++i) {
        const double sigma2 = 0.5 + 2.0 * rng.next_unit();
        const Channel ch(sigma2);
        const PowerBudget pb(0.5 + 2.0 * rng.next_unit());
        const double rate = 0.1 + rng.next_unit();
        const RhoNuParams rn = random_feasible(rng);
        const TiltParams tp = mu_lambda_from_rho_nu(rn, ch);
        if (!(tp.mu > 0.0)) continue;
        CHECK(big_l_mu_lambda(tp, rate, pb, ch) ==
              doctest::Approx(big_l_rho_nu(rn, rate, pb, ch)).epsilon(1e-11));
    }
}

TEST_CASE("big_l_mu_lambda vanishes at lambda = 0") {
    CHECK(big_l_mu_lambda(TiltParams(0.4, 0.0), 0.9, kUnitPower, kUnitChannel) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(big_l_mu_lambda(TiltParams(0.0, 1.0), 0.9, kUnitPower, kUnitChannel),
                    std::domain_error);
}

TEST_CASE("parameter maps invert each other") {
    // (mu=0, lambda=1) -> (rho=1/2, nu=0)
    const RhoNuParams a = rho_nu_from_mu_lambda(TiltParams(0.0, 1.0), kUnitChannel);
    CHECK(a.rho == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.nu == 0.0);
    const TiltParams b = mu_lambda_from_rho_nu(RhoNuParams(0.5, 0.25), kUnitChannel);
    CHECK(b.lambda == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.mu == doctest::Approx(0.25).epsilon(1e-15));
    // rho = 0 with nu > 0 is already rejected by the feasibility invariant,
    // so the inverse's undefined case is unreachable through a valid pair
    CHECK_THROWS_AS(RhoNuParams(0.0, 0.5), std::domain_error);
    CHECK_NOTHROW(mu_lambda_from_rho_nu(RhoNuParams(0.0, 0.0), kUnitChannel));

    StreamRng rng(7, 0);
    for (int i = 0; i < 100; ++i) {
        const Channel ch(0.3 + 3.0 * rng.next_unit());
        const RhoNuParams rn = random_feasible(rng);
        const TiltParams tp = mu_lambda_from_rho_nu(rn, ch);
        const RhoNuParams back = rho_nu_from_mu_lambda(tp, ch);
        CHECK(std::abs(back.rho - rn.rho) < 1e-12);
        CHECK(std::abs(back.nu - rn.nu) < 1e-12);
    }
}

TEST_CASE("big_l_rho_nu values and nu = 0 limit") {
    CHECK(big_l_rho_nu(RhoNuParams(0.0, 0.0), 1.0, kUnitPower, kUnitChannel) == 0.0);
    CHECK(big_l_rho_nu(RhoNuParams(kRhoStarAtNu03, 0.3), kRateAtNu03, kUnitPower,
                       kUnitChannel) == doctest::Approx(kExpAtNu03).epsilon(1e-13));
    // boundary rho = nu/(1+nu): L(1/3, 1/2, R=1) = 1/12 exactly
    CHECK(big_l_rho_nu(RhoNuParams(1.0 / 3.0, 0.5), 1.0, kUnitPower, kUnitChannel) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(std::isinf(big_l_rho_nu(RhoNuParams(0.5, 0.0), 1.0, kUnitPower, kUnitChannel)));
    CHECK(big_l_rho_nu(RhoNuParams(0.5, 0.0), 1.0, kUnitPower, kUnitChannel) < 0.0);
    CHECK_THROWS_AS(RhoNuParams(0.2, 0.5), std::domain_error);  // infeasible pair
    CHECK_THROWS_AS(RhoNuParams(1.0, 0.5), std::domain_error);
}

TEST_CASE("nu_zero closed form and defining equation") {
    CHECK(nu_zero(kUnitPower, kUnitChannel) == doctest::Approx(0.61803398874989485).epsilon(1e-14));
    CHECK(nu_zero(PowerBudget(1.0), Channel(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu_zero(PowerBudget(4.0), kUnitChannel) ==
          doctest::Approx(0.20710678118654752).epsilon(1e-14));
    for (double ratio : {0.1, 0.25, 1.0, 4.0, 10.0}) {
        const PowerBudget pb(ratio);
        const double n0 = nu_zero(pb, kUnitChannel);
        CHECK(std::abs(n0 * (1.0 + n0) - 1.0 / ratio) < 1e-12 / ratio);
    }
}

TEST_CASE("parametric curve endpoints and worked point") {
    const ExponentPoint p0 = parametric_point(0.0, kUnitPower, kUnitChannel);
    CHECK(p0.rate == doctest::Approx(capacity(kUnitChannel, kUnitPower)).epsilon(1e-15));
    CHECK(p0.exponent == 0.0);

    const ExponentPoint p3 = parametric_point(0.3, kUnitPower, kUnitChannel);
    CHECK(p3.rate == doctest::Approx(kRateAtNu03).epsilon(1e-14));
    CHECK(p3.exponent == doctest::Approx(kExpAtNu03).epsilon(1e-14));

    // near the blow-up boundary the point stays finite with G < R
    const ExponentPoint p6 = parametric_point(0.6, kUnitPower, kUnitChannel);
    CHECK(p6.rate == doctest::Approx(2.0871936349478186).epsilon(1e-13));
    CHECK(p6.exponent == doctest::Approx(1.3094379124341004).epsilon(1e-13));
    CHECK(p6.exponent / p6.rate < 1.0);

    CHECK_THROWS_AS(parametric_point(0.62, kUnitPower, kUnitChannel), std::domain_error);
    CHECK_THROWS_AS(parametric_point(-0.01, kUnitPower, kUnitChannel), std::domain_error);
}

TEST_CASE("rate map is strictly increasing in nu") {
    double prev_rate = -1.0, prev_exp = -1.0;
    for (int i = 0; i < 60; ++i) {
        const double nu = 0.01 * i;
        const ExponentPoint p = parametric_point(nu, kUnitPower, kUnitChannel);
        CHECK(p.rate > prev_rate);
        CHECK(p.exponent >= prev_exp);
        prev_rate = p.rate;
        prev_exp = p.exponent;
    }
}

TEST_CASE("exponent_at_rate inverts the curve") {
    CHECK(exponent_at_rate(capacity(kUnitChannel, kUnitPower), kUnitPower, kUnitChannel) == 0.0);
    CHECK(exponent_at_rate(kRateAtNu03, kUnitPower, kUnitChannel) ==
          doctest::Approx(kExpAtNu03).epsilon(1e-10));

    const RateSolve below = solve_rate(0.3, kUnitPower, kUnitChannel);
    CHECK(below.below_capacity);
    CHECK(below.exponent == 0.0);

    const RateSolve s = solve_rate(kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(!s.below_capacity);
    CHECK(s.nu == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(s.rho == doctest::Approx(kRhoStarAtNu03).epsilon(1e-9));

    // round trip across rates and ratios
    for (double ratio : {0.25, 1.0, 4.0}) {
        const PowerBudget pb(ratio);
        for (double nu_frac : {0.1, 0.4, 0.7, 0.95}) {
            const double nu = nu_frac * nu_zero(pb, kUnitChannel);
            const ExponentPoint p = parametric_point(nu, pb, kUnitChannel);
            CHECK(exponent_at_rate(p.rate, pb, kUnitChannel) ==
                  doctest::Approx(p.exponent).epsilon(1e-9));
        }
    }
}

TEST_CASE("gradient matches central differences") {
    StreamRng rng(23, 0);
    for (int i = 0; i < 100; ++i) {
        const Channel ch(0.5 + 2.0 * rng.next_unit());
        const PowerBudget pb(0.5 + 2.0 * rng.next_unit());
        const double rate = 0.2 + rng.next_unit();
        const RhoNuParams rn = random_feasible(rng);
        const FGradient g = f_gradient(rn, rate, pb, ch);
        const double h = 1e-6;
        auto f_rho = [&](double r) {
            return -big_l_rho_nu(RhoNuParams(r, rn.nu), rate, pb, ch);
        };
        auto f_nu = [&](double n) {
            return -big_l_rho_nu(RhoNuParams(rn.rho, n), rate, pb, ch);
        };
        const double fd_rho = oracles::central_diff(f_rho, rn.rho, h);
        const double fd_nu = oracles::central_diff(f_nu, rn.nu, h);
        CHECK(std::abs(g.d_rho - fd_rho) < 1e-5 * std::max(1.0, std::abs(fd_rho)));
        CHECK(std::abs(g.d_nu - fd_nu) < 1e-5 * std::max(1.0, std::abs(fd_nu)));
    }
}

TEST_CASE("gradient special values") {
    // log terms cancel at rho = 0.5, nu = 1, R = 0... the rate enters linearly
    const FGradient g = f_gradient(RhoNuParams(0.5, 1.0), 0.0, kUnitPower, kUnitChannel);
    CHECK(g.d_rho == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(f_gradient(RhoNuParams(0.0, 0.0), 1.0, kUnitPower, kUnitChannel),
                    std::domain_error);
}

TEST_CASE("hessian closed form, positive semidefinite on the cone") {
    const FHessian h = f_hessian(RhoNuParams(0.5, 1.0));
    CHECK(h.d_rho_rho == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(h.d_rho_nu == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(h.d_nu_nu == doctest::Approx(0.125).epsilon(1e-15));
    // rho = nu/(1+nu) boundary: the determinant factor vanishes
    CHECK(std::abs(h.det()) < 1e-10);

    StreamRng rng(29, 0);
    for (int i = 0; i < 50; ++i) {
        const RhoNuParams rn = random_feasible(rng);
        const FHessian hh = f_hessian(rn);
        CHECK(hh.det() >= -1e-10);
        // finite-difference check of each entry
        const Channel ch(1.0);
        const PowerBudget pb(1.0);
        const double rate = 0.8;
        const double step = 1e-5;
        auto dF_rho = [&](double r) {
            return f_gradient(RhoNuParams(r, rn.nu), rate, pb, ch).d_rho;
        };
        auto dF_nu = [&](double n) {
            return f_gradient(RhoNuParams(rn.rho, n), rate, pb, ch).d_nu;
        };
        auto dF_rho_of_nu = [&](double n) {
            return f_gradient(RhoNuParams(rn.rho, n), rate, pb, ch).d_rho;
        };
        CHECK(std::abs(hh.d_rho_rho - oracles::central_diff(dF_rho, rn.rho, step)) <
              1e-4 * std::max(1.0, std::abs(hh.d_rho_rho)));
        CHECK(std::abs(hh.d_nu_nu - oracles::central_diff(dF_nu, rn.nu, step)) <
              1e-4 * std::max(1.0, std::abs(hh.d_nu_nu)));
        CHECK(std::abs(hh.d_rho_nu - oracles::central_diff(dF_rho_of_nu, rn.nu, step)) <
              1e-4 * std::max(1.0, std::abs(hh.d_rho_nu)));
    }
}

TEST_CASE("stationary point solves the first-order conditions") {
    const RhoNuParams st = stationary_point(kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(st.rho == doctest::Approx(kRhoStarAtNu03).epsilon(1e-9));
    CHECK(st.nu == doctest::Approx(0.3).epsilon(1e-9));
    const FGradient g = f_gradient(st, kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(std::abs(g.d_rho) < 1e-8);
    CHECK(std::abs(g.d_nu) < 1e-8);
    CHECK(big_l_rho_nu(st, kRateAtNu03, kUnitPower, kUnitChannel) ==
          doctest::Approx(exponent_at_rate(kRateAtNu03, kUnitPower, kUnitChannel))
              .epsilon(1e-10));
    // feasibility rho* >= nu*/(1+nu*) holds strictly above capacity
    CHECK(st.rho >= st.nu / (1.0 + st.nu));
    CHECK_THROWS_AS(stationary_point(0.2, kUnitPower, kUnitChannel), std::domain_error);

    // endpoint limit: nu* and rho* vanish as R approaches capacity
    const RhoNuParams tiny =
        stationary_point(capacity(kUnitChannel, kUnitPower) + 1e-7, kUnitPower, kUnitChannel);
    CHECK(tiny.nu < 1e-3);
    CHECK(tiny.rho < 1e-3);
}

TEST_CASE("optimize_rho_nu agrees with the parametric route") {
    CHECK(std::abs(optimize_rho_nu(capacity(kUnitChannel, kUnitPower), kUnitPower,
                                   kUnitChannel)) < 1e-6);
    CHECK(optimize_rho_nu(kRateAtNu03, kUnitPower, kUnitChannel) ==
          doctest::Approx(kExpAtNu03).epsilon(1e-7));
    CHECK(std::abs(optimize_rho_nu(1.0, kUnitPower, kUnitChannel) -
                   exponent_at_rate(1.0, kUnitPower, kUnitChannel)) < 1e-5);

    const RhoNuOptimum full = optimize_rho_nu_full(kRateAtNu03, kUnitPower, kUnitChannel);
    CHECK(full.interior);
    CHECK(full.rho == doctest::Approx(kRhoStarAtNu03).epsilon(1e-5));
}

TEST_CASE("exponent shape properties") {
    StreamRng rng(31, 0);
    for (int i = 0; i < 100; ++i) {
        const double ratio = 0.2 + 4.0 * rng.next_unit();
        const PowerBudget pb(ratio);
        const double cap = capacity(kUnitChannel, pb);
        const double r1 = cap + 0.05 + 0.5 * rng.next_unit();
        const double r2 = r1 + 0.05 + 0.5 * rng.next_unit();
        const double g1 = exponent_at_rate(r1, pb, kUnitChannel);
        const double g2 = exponent_at_rate(r2, pb, kUnitChannel);
        // monotone increasing in R, bounded by R
        CHECK(g1 < g2);
        CHECK(g1 <= r1);
        CHECK(g2 <= r2);
        // midpoint convexity in R
        const double gm = exponent_at_rate(0.5 * (r1 + r2), pb, kUnitChannel);
        CHECK(gm <= 0.5 * (g1 + g2) + 1e-12);
        // monotone decreasing in Gamma at fixed R
        const PowerBudget bigger(ratio * 1.3);
        CHECK(exponent_at_rate(r1, bigger, kUnitChannel) <= g1 + 1e-12);
    }
}
