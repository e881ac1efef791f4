#pragma once

#include <cmath>
#include <stdexcept>

// Gaussian channel primitives shared by every exponent route: the AWGN law,
// the power budget, zero-mean Gaussian input laws and Gaussian test channels
// Y = alpha*X + S, and the closed forms for capacity, mutual information and
// conditional divergence. All rates and exponents are in nats.

namespace sce {

struct Channel {
    double noise_variance;  // sigma^2 > 0

    explicit Channel(double sigma2) : noise_variance(sigma2) {
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("Channel: noise_variance must be > 0");
    }
};

struct PowerBudget {
    double gamma;  // average power constraint, > 0

    explicit PowerBudget(double g) : gamma(g) {
        if (!(g > 0.0))
            throw std::invalid_argument("PowerBudget: gamma must be > 0");
    }
};

struct GaussianInputLaw {
    double theta;  // input variance, >= 0 (zero mean)

    explicit GaussianInputLaw(double t) : theta(t) {
        if (!(t >= 0.0))
            throw std::invalid_argument("GaussianInputLaw: theta must be >= 0");
    }
};

// Auxiliary Gaussian channel Y = alpha*X + S with S ~ N(0, xi).
struct GaussianTestChannel {
    double alpha;  // gain, unconstrained
    double xi;     // test noise variance, > 0

    GaussianTestChannel(double a, double x) : alpha(a), xi(x) {
        if (!(x > 0.0))
            throw std::invalid_argument("GaussianTestChannel: xi must be > 0");
    }
};

// C(Gamma | sigma^2) = (1/2) ln(1 + Gamma/sigma^2)
inline double capacity(const Channel& ch, const PowerBudget& pb) {
    return 0.5 * std::log1p(pb.gamma / ch.noise_variance);
}

// I(q_X, q_{Y|X}) for the jointly Gaussian pair: (1/2) ln(1 + alpha^2 theta / xi)
inline double gaussian_mutual_information(const GaussianInputLaw& input,
                                          const GaussianTestChannel& tc) {
    return 0.5 * std::log1p(tc.alpha * tc.alpha * input.theta / tc.xi);
}

// D(q_{Y|X} || W | q_X) between the test channel and the AWGN law:
//   (1/2)(1-alpha)^2 theta/sigma^2 + (1/2)[xi/sigma^2 - 1 + ln(sigma^2/xi)]
// Zero exactly at (alpha = 1, xi = sigma^2).
inline double gaussian_conditional_divergence(const GaussianInputLaw& input,
                                              const GaussianTestChannel& tc,
                                              const Channel& ch) {
    const double s2 = ch.noise_variance;
    const double mean_term = 0.5 * (1.0 - tc.alpha) * (1.0 - tc.alpha) * input.theta / s2;
    const double var_term = 0.5 * (tc.xi / s2 - 1.0 + std::log(s2 / tc.xi));
    return mean_term + var_term;
}

// h(p) = -p ln p - (1-p) ln(1-p), with 0 ln 0 := 0.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: p must be in [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

// [t]^+ = max{0, t}
inline double positive_part(double t) { return t > 0.0 ? t : 0.0; }

}  // namespace sce
