#include "sce/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sce/logsumexp.hpp"

namespace sce {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_2pi_var(double v) { return std::log(2.0 * std::numbers::pi * v); }

// Shared Omega quadrature: q_out described by its grid and log-density values.
// Terms are filled in parallel; the log-sum-exp reduction runs in fixed index
// order, so the value does not depend on the thread count.
double omega_impl(const DiscretizedDensity& qx, const std::vector<double>& ynode,
                  const std::vector<double>& ycell, const std::vector<double>& log_qy,
                  const TiltParams& tp, const Channel& ch) {
    const double s2 = ch.noise_variance;
    const double lam = tp.lambda;
    const double half_inv_s2 = (1.0 + lam) / (2.0 * s2);
    const double log_norm = 0.5 * (1.0 + lam) * log_2pi_var(s2);

    const std::size_t nx = qx.size(), ny = ynode.size();
    std::vector<double> log_mx(nx), tilt_x(nx), ycol(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        log_mx[i] = qx.mass[i] > 0.0 ? std::log(qx.mass[i]) : kNegInf;
        tilt_x[i] = tp.mu * lam * qx.node[i] * qx.node[i];
    }
    for (std::size_t j = 0; j < ny; ++j)
        ycol[j] = -lam * log_qy[j] + std::log(ycell[j]) - log_norm;

    std::vector<double> terms(nx * ny);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nx); ++i) {
        const double x = qx.node[i];
        const double base = log_mx[i] - tilt_x[i];
        double* row = terms.data() + i * ny;
        for (std::size_t j = 0; j < ny; ++j) {
            const double d = ynode[j] - x;
            row[j] = base - half_inv_s2 * d * d + ycol[j];
        }
    }
    return log_sum_exp(terms);
}

std::vector<double> positive_log_density(const DiscretizedDensity& q) {
    std::vector<double> log_q(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (!(q.mass[j] > 0.0))
            throw std::domain_error("omega: q_out must be strictly positive on its grid");
        log_q[j] = std::log(q.mass[j]) - std::log(q.cell[j]);
    }
    return log_q;
}

}  // namespace

// The tilted output concentrates more than the plain channel output, so this
// range is conservative for every functional below.
Grid1D output_grid(const DiscretizedDensity& qx, const Channel& ch, const QuadratureSpec& spec) {
    const double pad = spec.half_width * std::sqrt(ch.noise_variance);
    return Grid1D::make(qx.node.front() - pad, qx.node.back() + pad, spec.nodes_per_axis,
                        spec.rule);
}

double omega(const DiscretizedDensity& qx, const DiscretizedDensity& q_out,
             const TiltParams& tp, const Channel& ch) {
    return omega_impl(qx, q_out.node, q_out.cell, positive_log_density(q_out), tp, ch);
}

namespace detail {

double omega_serial(const DiscretizedDensity& qx, const DiscretizedDensity& q_out,
                    const TiltParams& tp, const Channel& ch) {
    const std::vector<double> log_qy = positive_log_density(q_out);
    const double s2 = ch.noise_variance;
    const double lam = tp.lambda;
    const double half_inv_s2 = (1.0 + lam) / (2.0 * s2);
    const double log_norm = 0.5 * (1.0 + lam) * log_2pi_var(s2);

    const std::size_t nx = qx.size(), ny = q_out.size();
    std::vector<double> terms(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = qx.node[i];
        const double base =
            (qx.mass[i] > 0.0 ? std::log(qx.mass[i]) : kNegInf) - tp.mu * lam * x * x;
        for (std::size_t j = 0; j < ny; ++j) {
            const double d = q_out.node[j] - x;
            terms[i * ny + j] = base - half_inv_s2 * d * d - lam * log_qy[j]
                                + std::log(q_out.cell[j]) - log_norm;
        }
    }
    return log_sum_exp(terms);
}

}  // namespace detail

double j_functional(const DiscretizedDensity& qx, const TiltParams& tp_ar, const Channel& ch,
                    const QuadratureSpec& spec) {
    const double lam = tp_ar.lambda;
    if (!(lam < 1.0)) throw std::domain_error("j_functional: lambda must be in [0,1)");
    const double s2 = ch.noise_variance;
    const double inv = 1.0 / (1.0 - lam);
    const double log_pn_norm = 0.5 * log_2pi_var(s2);

    // The inner bracket raised to (1-lambda) decays in y like the plain
    // noise kernel, so the input-support grid rule applies.
    const Grid1D ygrid = output_grid(qx, ch, spec);
    const std::size_t nx = qx.size(), ny = ygrid.node.size();

    std::vector<double> log_mx(nx), tilt_x(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        log_mx[i] = qx.mass[i] > 0.0 ? std::log(qx.mass[i]) : kNegInf;
        tilt_x[i] = tp_ar.mu * lam * qx.node[i] * qx.node[i];
    }

    std::vector<double> outer(ny);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ny); ++j) {
        const double y = ygrid.node[j];
        std::vector<double> inner(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            const double d = y - qx.node[i];
            inner[i] = log_mx[i] + inv * (-d * d / (2.0 * s2) - log_pn_norm - tilt_x[i]);
        }
        outer[j] = (1.0 - lam) * log_sum_exp(inner) + std::log(ygrid.weight[j]);
    }
    return log_sum_exp(outer);
}

TiltedOutput optimal_tilted_output_full(const DiscretizedDensity& qx, const TiltParams& tp,
                                        const Channel& ch, const QuadratureSpec& spec) {
    const double s2 = ch.noise_variance;
    const double lam = tp.lambda;
    const double log_pn_norm = 0.5 * log_2pi_var(s2);
    const Grid1D ygrid = output_grid(qx, ch, spec);
    const std::size_t nx = qx.size(), ny = ygrid.node.size();

    std::vector<double> log_mx(nx), tilt_x(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        log_mx[i] = qx.mass[i] > 0.0 ? std::log(qx.mass[i]) : kNegInf;
        tilt_x[i] = tp.mu * lam * qx.node[i] * qx.node[i];
    }

    std::vector<double> log_u_cell(ny);  // ln( u(y_j) * cell_j ), u unnormalized
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ny); ++j) {
        const double y = ygrid.node[j];
        std::vector<double> inner(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            const double d = y - qx.node[i];
            inner[i] = log_mx[i] + (1.0 + lam) * (-d * d / (2.0 * s2) - log_pn_norm) - tilt_x[i];
        }
        log_u_cell[j] = log_sum_exp(inner) / (1.0 + lam) + std::log(ygrid.weight[j]);
    }
    const double log_norm = log_sum_exp(log_u_cell);

    TiltedOutput out;
    out.log_normalizer = log_norm;
    out.density.node = ygrid.node;
    out.density.cell = ygrid.weight;
    out.density.mass.resize(ny);
    for (std::size_t j = 0; j < ny; ++j)
        out.density.mass[j] = std::exp(log_u_cell[j] - log_norm);
    return out;
}

DiscretizedDensity optimal_tilted_output(const DiscretizedDensity& qx, const TiltParams& tp,
                                         const Channel& ch, const QuadratureSpec& spec) {
    return optimal_tilted_output_full(qx, tp, ch, spec).density;
}

double min_omega_over_q(const DiscretizedDensity& qx, const TiltParams& tp, const Channel& ch,
                        const QuadratureSpec& spec) {
    return omega(qx, optimal_tilted_output(qx, tp, ch, spec), tp, ch);
}

UnderlineOmega underline_omega(const TiltParams& tp, const Channel& ch) {
    if (tp.lambda == 0.0 || tp.mu == 0.0) return UnderlineOmega{0.0, 0.0};  // zeta vanishes
    const double cap = (1.0 + tp.lambda) / (2.0 * tp.mu * tp.lambda);
    const double hi_end = cap * (1.0 - 1e-12);
    auto value = [&](double xi) { return zeta(tp, xi, ch); };

    const double inv_phi = 0.6180339887498949;
    double a = 0.0, b = hi_end;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 300 && (b - a) > 1e-13 * cap; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a); fc = value(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a); fd = value(d);
        }
    }
    double xi_hat = 0.5 * (a + b);
    double best = value(xi_hat);
    // The maximum may sit at the closed end of the interval.
    if (value(0.0) >= best) {
        xi_hat = 0.0;
        best = value(0.0);
    }
    return UnderlineOmega{best, xi_hat};
}

double saddle_value(const DiscretizedDensity& qx, const TiltParams& tp, const Channel& ch,
                    const QuadratureSpec& spec) {
    const double s2 = ch.noise_variance;
    if (!(tp.mu > 0.0) || tp.mu > (1.0 + tp.lambda) / (2.0 * s2))
        throw std::domain_error("saddle_value: need mu in (0, (1+lambda)/(2 sigma^2)]");
    const double eta = 1.0 / (2.0 * tp.mu) - s2 / (1.0 + tp.lambda);
    if (eta < 0.0) throw std::domain_error("saddle_value: eta < 0");
    const double qvar = eta + s2;

    // Against Q^{-lambda} the y-integrand for fixed x is Gaussian with center
    // c x and variance sy2 (the completed square of the tilted kernel). The
    // grid covers that set and resolves the sy scale; Q itself is evaluated
    // analytically in log space, which keeps far tail nodes finite.
    const double c = qvar / (eta + s2 / (1.0 + tp.lambda));
    const double sy2 = s2 * qvar / ((1.0 + tp.lambda) * eta + s2);
    const double sy = std::sqrt(sy2);
    const double xmax = std::max(std::abs(qx.node.front()), std::abs(qx.node.back()));
    const double half = c * xmax + spec.half_width * sy;
    const int nodes =
        std::max(spec.nodes_per_axis, static_cast<int>(10.0 * half / sy) + 32);
    const Grid1D ygrid = Grid1D::make(-half, half, nodes, spec.rule);

    std::vector<double> log_q(ygrid.node.size());
    const double log_norm = -0.5 * log_2pi_var(qvar);
    for (std::size_t j = 0; j < ygrid.node.size(); ++j)
        log_q[j] = log_norm - ygrid.node[j] * ygrid.node[j] / (2.0 * qvar);
    return omega_impl(qx, ygrid.node, ygrid.weight, log_q, tp, ch);
}

GohResult g_oh_numeric(double rate, const PowerBudget& pb, const Channel& ch,
                       const GohGrid& grid) {
    if (!(rate > 0.0)) throw std::domain_error("g_oh_numeric: rate must be > 0");
    const double s2 = ch.noise_variance;

    auto cell_value = [&](double rho, double frac) {
        if (rho <= 0.0) return 0.0;  // lambda = 0: zeta vanishes identically
        const double lam = rho / (1.0 - rho);
        const double mu = frac * (1.0 + lam) / (2.0 * s2);
        const TiltParams tp(mu, lam);
        const double om = mu > 0.0 ? underline_omega(tp, ch).value : 0.0;
        return (lam * (rate - mu * pb.gamma) - om) / (1.0 + lam);
    };

    double rho_lo = 0.0, rho_hi = grid.rho_max;
    double f_lo = 1e-6, f_hi = 1.0;
    double best_v = kNegInf, best_rho = 0.0, best_f = 1e-6;
    for (int round = 0; round < grid.refine_rounds; ++round) {
        const int nr = grid.rho_nodes, nf = grid.mu_nodes;
        std::vector<double> row_best(nr, kNegInf);
        std::vector<int> row_arg(nr, 0);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nr; ++i) {
            const double rho = rho_lo + (rho_hi - rho_lo) * i / (nr - 1);
            double vbest = kNegInf;
            int jbest = 0;
            for (int j = 0; j < nf; ++j) {
                const double frac = f_lo + (f_hi - f_lo) * j / (nf - 1);
                const double v = cell_value(rho, frac);
                if (v > vbest) {
                    vbest = v;
                    jbest = j;
                }
            }
            row_best[i] = vbest;
            row_arg[i] = jbest;
        }
        int ibest = 0;
        for (int i = 0; i < nr; ++i)
            if (row_best[i] > row_best[ibest]) ibest = i;
        const double drho = (rho_hi - rho_lo) / (nr - 1);
        const double df = (f_hi - f_lo) / (nf - 1);
        best_rho = rho_lo + drho * ibest;
        best_f = f_lo + df * row_arg[ibest];
        best_v = row_best[ibest];
        rho_lo = std::max(0.0, best_rho - 2.0 * drho);
        rho_hi = std::min(grid.rho_max, best_rho + 2.0 * drho);
        f_lo = std::max(1e-9, best_f - 2.0 * df);
        f_hi = std::min(1.0, best_f + 2.0 * df);
    }
    const double lam = best_rho > 0.0 ? best_rho / (1.0 - best_rho) : 0.0;
    const double mu = best_f * (1.0 + lam) / (2.0 * s2);
    return GohResult{best_v, mu, lam};
}

}  // namespace sce
