#pragma once

#include <cstdint>
#include <vector>

#include "sce/channel.hpp"

// Operational side: random power-constrained block codes, Monte Carlo
// estimation of the correct-decoding probability under nearest-neighbor (ML)
// decoding, the direct-part lower bound, and the change-of-measure
// diagnostic. Per-trial randomness is keyed by (seed, trial index), so the
// counts are independent of execution order and worker count.

namespace sce {

// Desk-scale limits; all configurable per call.
struct SimCaps {
    std::uint64_t max_codewords = 1'000'000;
    int max_block_length = 64;
    std::uint64_t max_trials = 10'000'000;
};

struct Codebook {
    int n = 0;                      // block length
    std::uint64_t num_codewords = 0;
    double rate = 0.0;              // ln(M)/n, nats
    std::vector<double> codewords;  // row-major, num_codewords x n

    const double* codeword(std::uint64_t k) const { return codewords.data() + k * n; }
};

struct SimResult {
    int n = 0;
    double rate_nats = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t correct = 0;
    double p_c_hat = 0.0;
    double std_err = 0.0;
    double measured_exponent = 0.0;  // -(1/n) ln p_c_hat
    std::uint64_t seed = 0;
};

// M = ceil(e^{nR}) codewords with i.i.d. N(0, theta) entries, each rescaled
// by min(1, sqrt(n Gamma)/||x||), so ||x||^2 <= n Gamma holds exactly.
Codebook generate_random_codebook(int n, double rate, double theta, const PowerBudget& pb,
                                  std::uint64_t seed, const SimCaps& caps = {});

// Monte Carlo correct probability under the AWGN law with ML decoding
// (nearest codeword, ties to the lowest index).
SimResult simulate_correct_probability(const Codebook& cb, const Channel& ch,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const SimCaps& caps = {});
// Serial reference, kept for testing and benchmarking; bit-identical counts.
SimResult simulate_correct_probability_serial(const Codebook& cb, const Channel& ch,
                                              std::uint64_t trials, std::uint64_t seed,
                                              const SimCaps& caps = {});

// P_c >= exp{-n [(1-delta)^{-1} D + eta_n(delta)]},
// eta_n(delta) = (1/n)(1-delta)^{-1} h(1-delta); requires delta in [0, 1/2).
double direct_part_bound(double divergence, int n, double delta);

struct ChangeOfMeasure {
    double alpha_hat = 0.0;  // correct probability under the AWGN law
    double beta_hat = 0.0;   // correct probability under the test channel
    double se_alpha = 0.0;
    double se_beta = 0.0;
    double n_divergence = 0.0;  // n * D(q_{Y|X} || W | q_X), closed form
    double logsum_mid = 0.0;    // beta ln(beta/alpha) + (1-beta) ln((1-beta)/(1-alpha))
    double rhs = 0.0;           // -h(beta) - beta ln(alpha)
    double slack_mid = 0.0;     // 3 combined standard errors, delta method
    bool chain_ok = false;      // n D >= mid - slack and mid >= rhs
};

// Estimates alpha_n and beta_n with shared per-trial streams (identical
// messages and standard normal draws for both channels), computes n D from
// the closed form with theta = max_k ||x_k||^2 / n, and checks the log-sum
// chain within 3 combined standard errors.
ChangeOfMeasure change_of_measure_diagnostic(const Codebook& cb, const GaussianTestChannel& tc,
                                             const Channel& ch, std::uint64_t trials,
                                             std::uint64_t seed, const SimCaps& caps = {});

}  // namespace sce
