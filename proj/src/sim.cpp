#include "sce/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sce/rng.hpp"

namespace sce {

namespace {

// Trials are decoded in batches so one pass over the codebook serves a whole
// batch; each (trial, codeword) score is still the same t-ordered dot
// product, so batching never changes a trial's outcome.
constexpr std::uint64_t kBatch = 16;

// ML decoding for equiprobable messages over an additive Gaussian channel is
// the nearest codeword; maximizing <y,x_k> - ||x_k||^2/2 is equivalent and
// skips the common ||y||^2 term. Ties break to the lowest index.
//
// The decoder keeps a zero-padded copy of the codebook whose stride is a
// multiple of 8 and dispatches to a kernel with that length as a constant, so
// the dot/argmax loops fully unroll and the batch lanes stay in registers.
struct Decoder {
    const Codebook& cb;
    int n_pad;
    std::vector<double> words;     // m x n_pad, zero-padded rows
    std::vector<double> neg_half;  // -||x_k||^2 / 2

    explicit Decoder(const Codebook& c)
        : cb(c), n_pad((c.n + 7) & ~7), words(c.num_codewords * static_cast<std::uint64_t>(n_pad), 0.0),
          neg_half(c.num_codewords, 0.0) {
        for (std::uint64_t k = 0; k < cb.num_codewords; ++k) {
            const double* x = cb.codeword(k);
            double* w = words.data() + k * n_pad;
            double s = 0.0;
            for (int t = 0; t < cb.n; ++t) {
                w[t] = x[t];
                s += x[t] * x[t];
            }
            neg_half[k] = -0.5 * s;
        }
    }

    double max_codeword_power() const {
        double p = 0.0;
        for (double h : neg_half) p = std::max(p, -2.0 * h / cb.n);
        return p;
    }

    template <int NPad>
    void decode_impl(const double* yT, std::uint64_t count, std::uint64_t* out) const {
        double best_score[kBatch];
        std::uint64_t best[kBatch];
        for (std::uint64_t b = 0; b < kBatch; ++b) {
            best_score[b] = -std::numeric_limits<double>::infinity();
            best[b] = 0;
        }
        for (std::uint64_t k = 0; k < cb.num_codewords; ++k) {
            const double* x = words.data() + k * NPad;
            double acc[kBatch] = {0.0};
            for (int t = 0; t < NPad; ++t) {
                const double xv = x[t];
                const double* row = yT + static_cast<std::uint64_t>(t) * kBatch;
                // vectorize across the batch lanes, not the reduction axis
#pragma omp simd
                for (std::uint64_t b = 0; b < kBatch; ++b) acc[b] += xv * row[b];
            }
            const double nh = neg_half[k];
            for (std::uint64_t b = 0; b < kBatch; ++b) {
                const double score = acc[b] + nh;
                if (score > best_score[b]) {
                    best_score[b] = score;
                    best[b] = k;
                }
            }
        }
        for (std::uint64_t b = 0; b < count; ++b) out[b] = best[b];
    }

    // Decodes `count` <= kBatch received words. yT is coordinate-major with a
    // fixed kBatch stride (yT[t*kBatch + b]); rows past n and lanes past
    // `count` are zero.
    void decode_batch(const double* yT, std::uint64_t count, std::uint64_t* out) const {
        switch (n_pad) {
            case 8: return decode_impl<8>(yT, count, out);
            case 16: return decode_impl<16>(yT, count, out);
            case 24: return decode_impl<24>(yT, count, out);
            case 32: return decode_impl<32>(yT, count, out);
            case 40: return decode_impl<40>(yT, count, out);
            case 48: return decode_impl<48>(yT, count, out);
            case 56: return decode_impl<56>(yT, count, out);
            default: return decode_impl<64>(yT, count, out);
        }
    }
};

// One batch of trials under Y = gain*X + sd*Z; returns the number decoded
// correctly. Trial indices are first + 0 .. first + count - 1.
std::uint64_t run_batch(const Codebook& cb, const Decoder& decoder, double gain, double sd,
                        std::uint64_t seed, std::uint64_t first, std::uint64_t count) {
    double yT[kBatch * 64] = {0.0};
    std::uint64_t msgs[kBatch], decoded[kBatch];
    for (std::uint64_t b = 0; b < count; ++b) {
        StreamRng rng(seed, first + b, kSaltTrial);
        msgs[b] = rng.next_index(cb.num_codewords);
        const double* x = cb.codeword(msgs[b]);
        for (int t = 0; t < cb.n; ++t)
            yT[static_cast<std::uint64_t>(t) * kBatch + b] = gain * x[t] + sd * rng.next_normal();
    }
    decoder.decode_batch(yT, count, decoded);
    std::uint64_t correct = 0;
    for (std::uint64_t b = 0; b < count; ++b) correct += decoded[b] == msgs[b] ? 1 : 0;
    return correct;
}

SimResult summarize(const Codebook& cb, std::uint64_t trials, std::uint64_t correct,
                    std::uint64_t seed) {
    SimResult r;
    r.n = cb.n;
    r.rate_nats = cb.rate;
    r.trials = trials;
    r.correct = correct;
    r.seed = seed;
    r.p_c_hat = static_cast<double>(correct) / static_cast<double>(trials);
    r.std_err = std::sqrt(r.p_c_hat * (1.0 - r.p_c_hat) / static_cast<double>(trials));
    r.measured_exponent = r.p_c_hat > 0.0 ? -std::log(r.p_c_hat) / cb.n
                                          : std::numeric_limits<double>::infinity();
    return r;
}

void check_sim_args(const Codebook& cb, std::uint64_t trials, const SimCaps& caps) {
    if (cb.num_codewords < 1 || cb.n < 1) throw std::invalid_argument("simulate: empty codebook");
    if (cb.n > 64) throw std::length_error("simulate: block length above the hard limit (64)");
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if (trials > caps.max_trials) throw std::length_error("simulate: trials above the cap");
}

}  // namespace

Codebook generate_random_codebook(int n, double rate, double theta, const PowerBudget& pb,
                                  std::uint64_t seed, const SimCaps& caps) {
    if (n < 1) throw std::invalid_argument("generate_random_codebook: n must be >= 1");
    if (n > caps.max_block_length)
        throw std::length_error("generate_random_codebook: n above the cap");
    if (!(rate >= 0.0)) throw std::invalid_argument("generate_random_codebook: rate must be >= 0");
    if (!(theta >= 0.0) || theta > pb.gamma)
        throw std::invalid_argument("generate_random_codebook: need 0 <= theta <= gamma");
    const double m_real = std::ceil(std::exp(n * rate));
    if (!(m_real <= static_cast<double>(caps.max_codewords)))
        throw std::length_error("generate_random_codebook: e^{nR} above the codeword cap");
    const std::uint64_t m = static_cast<std::uint64_t>(m_real);

    Codebook cb;
    cb.n = n;
    cb.num_codewords = m;
    cb.rate = std::log(static_cast<double>(m)) / n;
    cb.codewords.resize(m * static_cast<std::uint64_t>(n));
    const double sd = std::sqrt(theta);
    const double power_cap = n * pb.gamma;

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(m); ++k) {
        StreamRng rng(seed, static_cast<std::uint64_t>(k), kSaltCodebook);
        double* x = cb.codewords.data() + k * n;
        double norm2 = 0.0;
        for (int t = 0; t < n; ++t) {
            x[t] = sd * rng.next_normal();
            norm2 += x[t] * x[t];
        }
        if (norm2 > power_cap) {
            const double scale = std::sqrt(power_cap / norm2);
            for (int t = 0; t < n; ++t) x[t] *= scale;
        }
    }
    return cb;
}

SimResult simulate_correct_probability(const Codebook& cb, const Channel& ch,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const SimCaps& caps) {
    check_sim_args(cb, trials, caps);
    const Decoder decoder(cb);
    const double sd = std::sqrt(ch.noise_variance);
    const std::int64_t batches = static_cast<std::int64_t>((trials + kBatch - 1) / kBatch);
    std::uint64_t correct = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct)
    for (std::int64_t i = 0; i < batches; ++i) {
        const std::uint64_t first = static_cast<std::uint64_t>(i) * kBatch;
        correct += run_batch(cb, decoder, 1.0, sd, seed, first,
                             std::min(kBatch, trials - first));
    }
    return summarize(cb, trials, correct, seed);
}

SimResult simulate_correct_probability_serial(const Codebook& cb, const Channel& ch,
                                              std::uint64_t trials, std::uint64_t seed,
                                              const SimCaps& caps) {
    check_sim_args(cb, trials, caps);
    const Decoder decoder(cb);
    const double sd = std::sqrt(ch.noise_variance);
    std::uint64_t correct = 0;
    for (std::uint64_t first = 0; first < trials; first += kBatch)
        correct += run_batch(cb, decoder, 1.0, sd, seed, first,
                             std::min(kBatch, trials - first));
    return summarize(cb, trials, correct, seed);
}

double direct_part_bound(double divergence, int n, double delta) {
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::domain_error("direct_part_bound: delta must be in [0, 1/2)");
    if (!(divergence >= 0.0)) throw std::domain_error("direct_part_bound: D must be >= 0");
    if (n < 1) throw std::domain_error("direct_part_bound: n must be >= 1");
    const double inv = 1.0 / (1.0 - delta);
    const double eta_n = inv * binary_entropy(1.0 - delta) / n;
    return std::exp(-n * (inv * divergence + eta_n));
}

ChangeOfMeasure change_of_measure_diagnostic(const Codebook& cb, const GaussianTestChannel& tc,
                                             const Channel& ch, std::uint64_t trials,
                                             std::uint64_t seed, const SimCaps& caps) {
    check_sim_args(cb, trials, caps);
    const Decoder decoder(cb);
    const double sd_true = std::sqrt(ch.noise_variance);
    const double sd_test = std::sqrt(tc.xi);

    // Shared streams: the same message and the same standard normal draws
    // feed both channels, so tc = W reproduces alpha_hat = beta_hat exactly.
    const std::int64_t batches = static_cast<std::int64_t>((trials + kBatch - 1) / kBatch);
    std::uint64_t correct_true = 0, correct_test = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct_true, correct_test)
    for (std::int64_t i = 0; i < batches; ++i) {
        const std::uint64_t first = static_cast<std::uint64_t>(i) * kBatch;
        const std::uint64_t count = std::min(kBatch, trials - first);
        double ys_true[kBatch * 64] = {0.0}, ys_test[kBatch * 64] = {0.0};
        std::uint64_t msgs[kBatch], dec_true[kBatch], dec_test[kBatch];
        for (std::uint64_t b = 0; b < count; ++b) {
            StreamRng rng(seed, first + b, kSaltTrial);
            msgs[b] = rng.next_index(cb.num_codewords);
            const double* x = cb.codeword(msgs[b]);
            for (int t = 0; t < cb.n; ++t) {
                const double z = rng.next_normal();
                ys_true[static_cast<std::uint64_t>(t) * kBatch + b] = x[t] + sd_true * z;
                ys_test[static_cast<std::uint64_t>(t) * kBatch + b] = tc.alpha * x[t] + sd_test * z;
            }
        }
        decoder.decode_batch(ys_true, count, dec_true);
        decoder.decode_batch(ys_test, count, dec_test);
        for (std::uint64_t b = 0; b < count; ++b) {
            correct_true += dec_true[b] == msgs[b] ? 1 : 0;
            correct_test += dec_test[b] == msgs[b] ? 1 : 0;
        }
    }

    ChangeOfMeasure out;
    const double nt = static_cast<double>(trials);
    out.alpha_hat = static_cast<double>(correct_true) / nt;
    out.beta_hat = static_cast<double>(correct_test) / nt;
    if (out.alpha_hat <= 0.0 || out.alpha_hat >= 1.0 || out.beta_hat <= 0.0 ||
        out.beta_hat >= 1.0)
        throw std::runtime_error("change_of_measure_diagnostic: degenerate estimate");
    out.se_alpha = std::sqrt(out.alpha_hat * (1.0 - out.alpha_hat) / nt);
    out.se_beta = std::sqrt(out.beta_hat * (1.0 - out.beta_hat) / nt);

    // Lemma constant: the per-codeword divergence bound holds with theta the
    // largest empirical codeword power.
    out.n_divergence = cb.n * gaussian_conditional_divergence(
                                  GaussianInputLaw(decoder.max_codeword_power()), tc, ch);

    const double a = out.alpha_hat, b = out.beta_hat;
    out.logsum_mid = b * std::log(b / a) + (1.0 - b) * std::log((1.0 - b) / (1.0 - a));
    out.rhs = -binary_entropy(b) - b * std::log(a);
    const double d_mid_da = -b / a + (1.0 - b) / (1.0 - a);
    const double d_mid_db = std::log(b / a) - std::log((1.0 - b) / (1.0 - a));
    out.slack_mid = 3.0 * std::sqrt(d_mid_da * d_mid_da * out.se_alpha * out.se_alpha
                                    + d_mid_db * d_mid_db * out.se_beta * out.se_beta);
    // mid >= rhs is an algebraic identity; only the divergence side carries
    // Monte Carlo noise.
    out.chain_ok = out.n_divergence >= out.logsum_mid - out.slack_mid
                   && out.logsum_mid >= out.rhs - 1e-12;
    return out;
}

}  // namespace sce
