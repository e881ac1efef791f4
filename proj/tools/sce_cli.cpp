// Command-line surface: point evaluations, curve sweeps, cross-route
// consistency reports, and Monte Carlo simulation runs, emitting CSV/JSON.
//
// Exit codes: 0 ok, 2 usage/validation, 3 solver failure, 4 identity violation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sce/channel.hpp"
#include "sce/closed_form.hpp"
#include "sce/dk.hpp"
#include "sce/quadrature.hpp"
#include "sce/rng.hpp"
#include "sce/sim.hpp"
#include "sce/variational.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIdentity = 4;

std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

// Relative output paths land in $SCE_OUT_DIR when it is set.
std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path == "-") return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("SCE_OUT_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / p).string();
    return path;
}

json sim_result_to_json(const sce::SimResult& r) {
    json j;
    j["n"] = r.n;
    j["rate_nats"] = r.rate_nats;
    j["trials"] = r.trials;
    j["correct"] = r.correct;
    j["p_c_hat"] = r.p_c_hat;
    j["std_err"] = r.std_err;
    j["measured_exponent"] = r.measured_exponent;
    j["seed"] = r.seed;
    return j;
}

int cmd_capacity(double gamma, double sigma2, const std::string& format) {
    const sce::Channel ch(sigma2);
    const sce::PowerBudget pb(gamma);
    const double c = sce::capacity(ch, pb);
    if (format == "json") {
        json j;
        j["capacity_nats"] = c;
        j["capacity_bits"] = c / std::log(2.0);
        j["gamma"] = gamma;
        j["sigma2"] = sigma2;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "capacity: " << fmt9(c) << " nats (" << fmt9(c / std::log(2.0))
                  << " bits)\n";
    }
    return 0;
}

int cmd_exponent(double rate, double gamma, double sigma2, const std::string& method) {
    const sce::Channel ch(sigma2);
    const sce::PowerBudget pb(gamma);
    json j;
    j["rate_nats"] = rate;
    j["gamma"] = gamma;
    j["sigma2"] = sigma2;
    j["method"] = method;
    const double cap = sce::capacity(ch, pb);
    j["capacity_nats"] = cap;
    j["below_capacity"] = rate <= cap;

    double parametric = 0.0, opt = 0.0, dk = 0.0, variational = 0.0;
    if (method == "parametric" || method == "all") {
        const sce::RateSolve s = sce::solve_rate(rate, pb, ch);
        parametric = s.exponent;
        j["exponent_nats"] = s.exponent;
        j["nu_star"] = s.nu;
        j["rho_star"] = s.rho;
    }
    if (method == "opt" || method == "all") {
        const sce::RhoNuOptimum o = sce::optimize_rho_nu_full(rate, pb, ch);
        opt = o.value;
        j["exponent_nats"] = o.value;
        j["rho"] = o.rho;
        j["nu"] = o.nu;
        j["interior_maximum"] = o.interior;
    }
    if (method == "dk" || method == "all") {
        const sce::DkMinimum m = sce::g_dk_full(rate, pb, ch);
        dk = m.value;
        j["exponent_nats"] = m.value;
        j["argmin_theta"] = m.argmin.theta;
        j["argmin_alpha"] = m.argmin.alpha;
        j["argmin_xi"] = m.argmin.xi;
    }
    if (method == "variational" || method == "all") {
        const sce::GohResult r = sce::g_oh_numeric(rate, pb, ch);
        variational = r.value;
        j["exponent_nats"] = r.value;
        j["argmax_mu"] = r.mu;
        j["argmax_lambda"] = r.lambda;
    }
    if (method == "all") {
        const double vals[4] = {parametric, opt, dk, variational};
        double disc = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) disc = std::max(disc, std::abs(vals[a] - vals[b]));
        j["exponent_nats"] = parametric;
        j["parametric"] = parametric;
        j["opt"] = opt;
        j["dk"] = dk;
        j["variational"] = variational;
        j["max_pairwise_discrepancy"] = disc;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_curve(double gamma, double sigma2, double nu_max, int steps, const std::string& out) {
    const sce::Channel ch(sigma2);
    const sce::PowerBudget pb(gamma);
    const double n0 = sce::nu_zero(pb, ch);
    if (!(nu_max >= 0.0) || nu_max >= n0) {
        std::cerr << "curve: nu-max must lie in [0, nu0); nu0 = " << fmt9(n0) << "\n";
        return kExitUsage;
    }
    if (steps < 1) {
        std::cerr << "curve: steps must be >= 1\n";
        return kExitUsage;
    }

    std::ostringstream csv;
    csv << "nu,R_nats,G_nats,rho_star,G_over_R\n";
    for (int i = 0; i <= steps; ++i) {
        const double nu = nu_max * i / steps;
        const sce::ExponentPoint p = sce::parametric_point(nu, pb, ch);
        const double rho = nu / (1.0 + nu) + nu * gamma / sigma2;
        const double ratio = p.rate > 0.0 ? p.exponent / p.rate : 0.0;
        csv << fmt9(p.nu) << ',' << fmt9(p.rate) << ',' << fmt9(p.exponent) << ',' << fmt9(rho)
            << ',' << fmt9(ratio) << "\n";
    }

    const std::string path = resolve_output_path(out);
    if (path.empty() || path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream f(path);
        if (!f) {
            std::cerr << "curve: cannot open " << path << " for writing\n";
            return kExitUsage;
        }
        f << csv.str();
    }
    return 0;
}

struct CheckReport {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string detail;
};

// Feasible tilt draws for the identity checks.
sce::TiltParams random_feasible_tilt(sce::StreamRng& rng, double sigma2, double lambda_cap) {
    const double lambda = 0.05 + (lambda_cap - 0.05) * rng.next_unit();
    const double mu_cap = (1.0 + lambda) / (2.0 * sigma2);
    const double mu = mu_cap * (0.15 + 0.85 * rng.next_unit());
    return sce::TiltParams(mu, lambda);
}

int cmd_crosscheck(std::vector<double> ratios, int samples, double tol_identity,
                   double tol_routes, double tol_variational, std::uint64_t seed,
                   const std::string& inject_bug) {
    const double sigma2 = 1.0;
    const sce::Channel ch(sigma2);
    const sce::QuadratureSpec spec;
    std::vector<CheckReport> checks;

    // lmSdd: Omega at the Gaussian pair equals zeta(xi(mu,lambda,theta)).
    {
        CheckReport r{"lmSdd", 0.0, tol_identity, true, ""};
        sce::StreamRng rng(seed, 1);
        for (int i = 0; i < samples; ++i) {
            const sce::TiltParams tp = random_feasible_tilt(rng, sigma2, 4.0);
            const double theta = 0.3 + 2.7 * rng.next_unit();
            const double xi = sce::xi_of_theta(tp, theta);
            const sce::DiscretizedDensity qx = sce::gaussian_density(0.0, theta, spec);
            const sce::DiscretizedDensity q = sce::gaussian_density(0.0, xi + sigma2, spec);
            double zeta_val = sce::zeta(tp, xi, ch);
            if (inject_bug == "lmSdd") zeta_val += 1e-3;
            r.max_error = std::max(r.max_error, std::abs(sce::omega(qx, q, tp, ch) - zeta_val));
        }
        r.pass = r.max_error < r.tolerance;
        checks.push_back(r);
    }

    // AssdZ: min over Q equals (1+lambda) J, and the tilted output is minimal.
    {
        CheckReport r{"AssdZ", 0.0, tol_identity, true, ""};
        sce::StreamRng rng(seed, 2);
        const std::vector<sce::DiscretizedDensity> inputs = {
            sce::gaussian_density(0.0, 1.0, spec),
            sce::uniform_density(-2.0, 2.0, spec),
            sce::bimodal_density(-1.5, 0.5, 2.0, 0.3, spec),
        };
        for (const auto& qx : inputs) {
            for (int i = 0; i < samples; ++i) {
                const sce::TiltParams tp = random_feasible_tilt(rng, sigma2, 4.0);
                const double lhs = sce::min_omega_over_q(qx, tp, ch, spec);
                const sce::TiltParams tp_ar(tp.mu, tp.lambda / (1.0 + tp.lambda));
                const double rhs = (1.0 + tp.lambda) * sce::j_functional(qx, tp_ar, ch, spec);
                r.max_error = std::max(r.max_error, std::abs(lhs - rhs));
            }
        }
        // Perturbation minimality at one representative draw.
        {
            const sce::TiltParams tp(0.5, 1.0);
            const auto& qx = inputs[1];
            const sce::DiscretizedDensity qstar = sce::optimal_tilted_output(qx, tp, ch, spec);
            const double vmin = sce::omega(qx, qstar, tp, ch);
            sce::StreamRng prng(seed, 3);
            for (int p = 0; p < 20; ++p) {
                sce::DiscretizedDensity q = qstar;
                double total = 0.0;
                for (double& m : q.mass) total += m;
                std::vector<double> noise(q.mass.size());
                double nsum = 0.0;
                for (double& v : noise) {
                    v = prng.next_unit();
                    nsum += v;
                }
                for (std::size_t k = 0; k < q.mass.size(); ++k)
                    q.mass[k] = 0.95 * q.mass[k] / total + 0.05 * noise[k] / nsum;
                const double v = sce::omega(qx, q, tp, ch);
                if (v < vmin - 1e-9) {
                    r.pass = false;
                    r.detail = "perturbed output beat the minimizer";
                }
            }
        }
        r.pass = r.pass && r.max_error < r.tolerance;
        checks.push_back(r);
    }

    // Aggd: the saddle output value does not depend on the input density.
    {
        CheckReport r{"Aggd", 0.0, tol_identity, true, ""};
        sce::StreamRng rng(seed, 4);
        const std::vector<sce::DiscretizedDensity> inputs = {
            sce::gaussian_density(0.0, 0.7, spec),
            sce::gaussian_density(0.0, 2.0, spec),
            sce::uniform_density(-3.0, 3.0, spec),
            sce::bimodal_density(-2.0, 0.4, 1.0, 0.6, spec),
            sce::uniform_density(-0.5, 1.5, spec),
        };
        for (int i = 0; i < 5; ++i) {
            const sce::TiltParams tp = random_feasible_tilt(rng, sigma2, 4.0);
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& qx : inputs) {
                const double v = sce::saddle_value(qx, tp, ch, spec);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            r.max_error = std::max(r.max_error, hi - lo);
        }
        r.pass = r.max_error < r.tolerance;
        checks.push_back(r);
    }

    // proDss restriction: mu beyond (1+lambda)/(2 sigma^2) never helps.
    {
        CheckReport r{"proDss-restriction", 0.0, 1e-12, true, ""};
        for (double ratio : ratios) {
            const sce::PowerBudget pb(ratio * sigma2);
            const double rate = sce::capacity(ch, pb) + 0.4;
            const double inside = sce::g_oh_numeric(rate, pb, ch).value;
            double outside = -std::numeric_limits<double>::infinity();
            for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                const double mu_cap = (1.0 + lambda) / (2.0 * sigma2);
                for (int k = 1; k <= 12; ++k) {
                    const double mu = mu_cap * (1.0 + 0.5 * k);
                    const sce::TiltParams tp(mu, lambda);
                    const double om = sce::underline_omega(tp, ch).value;
                    outside = std::max(
                        outside, (lambda * (rate - mu * pb.gamma) - om) / (1.0 + lambda));
                }
            }
            r.max_error = std::max(r.max_error, outside - inside);
        }
        r.pass = r.max_error <= r.tolerance;
        checks.push_back(r);
    }

    // Route equality across the rate grid.
    {
        CheckReport routes{"route-equality", 0.0, tol_routes, true, ""};
        CheckReport vroutes{"route-equality-variational", 0.0, tol_variational, true, ""};
        for (double ratio : ratios) {
            const sce::PowerBudget pb(ratio * sigma2);
            const double cap = sce::capacity(ch, pb);
            for (int k = 1; k <= 4; ++k) {
                const double rate = cap + 0.3 * k;
                const double a = sce::exponent_at_rate(rate, pb, ch);
                const double b = sce::optimize_rho_nu(rate, pb, ch);
                const double c = sce::g_dk(rate, pb, ch);
                const double d = sce::g_oh_numeric(rate, pb, ch).value;
                routes.max_error = std::max({routes.max_error, std::abs(a - b),
                                             std::abs(a - c), std::abs(b - c)});
                vroutes.max_error = std::max(vroutes.max_error, std::abs(a - d));
            }
        }
        routes.pass = routes.max_error < routes.tolerance;
        vroutes.pass = vroutes.max_error < vroutes.tolerance;
        checks.push_back(routes);
        checks.push_back(vroutes);
    }

    json j;
    j["checks"] = json::array();
    bool all_pass = true;
    std::string first_fail;
    for (const CheckReport& c : checks) {
        json jc;
        jc["name"] = c.name;
        jc["max_error"] = c.max_error;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        if (!c.detail.empty()) jc["detail"] = c.detail;
        j["checks"].push_back(jc);
        if (!c.pass && first_fail.empty()) first_fail = c.name;
        all_pass = all_pass && c.pass;
    }
    j["all_pass"] = all_pass;
    std::cout << j.dump(2) << "\n";
    if (!all_pass) {
        std::cerr << "crosscheck: identity violated: " << first_fail << "\n";
        return kExitIdentity;
    }
    return 0;
}

int cmd_simulate(int n, double rate, double gamma, double sigma2, double theta,
                 std::uint64_t trials, std::uint64_t seed) {
    const sce::Channel ch(sigma2);
    const sce::PowerBudget pb(gamma);
    const sce::Codebook cb = sce::generate_random_codebook(n, rate, theta, pb, seed);
    const sce::SimResult r = sce::simulate_correct_probability(cb, ch, trials, seed);
    const sce::RateSolve s = sce::solve_rate(cb.rate, pb, ch);

    json j;
    j["sim"] = sim_result_to_json(r);
    j["analytic_exponent_nats"] = s.exponent;
    j["below_capacity"] = s.below_capacity;
    j["exponent_margin"] = r.measured_exponent - s.exponent;
    std::cout << j.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correct-decoding exponent toolkit for the AWGN channel"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    double gamma = 1.0, sigma2 = 1.0, rate = 0.5, nu_max = 0.5, theta = -1.0;
    int steps = 100, n = 20, samples = 10;
    std::uint64_t trials = 100000, seed = 1;
    std::string format = "text", method = "parametric", out = "-";
    std::string inject_bug;
    std::vector<double> ratios{0.25, 1.0, 4.0};

    CLI::App* c_cap = app.add_subcommand("capacity", "Channel capacity in nats and bits");
    c_cap->add_option("--gamma", gamma, "Power budget")->check(CLI::PositiveNumber);
    c_cap->add_option("--sigma2", sigma2, "Noise variance")->check(CLI::PositiveNumber);
    c_cap->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    CLI::App* c_exp = app.add_subcommand("exponent", "Correct-decoding exponent at a rate");
    c_exp->add_option("--rate", rate, "Rate in nats")->required()->check(CLI::PositiveNumber);
    c_exp->add_option("--gamma", gamma)->check(CLI::PositiveNumber);
    c_exp->add_option("--sigma2", sigma2)->check(CLI::PositiveNumber);
    c_exp->add_option("--method", method)
        ->check(CLI::IsMember({"parametric", "opt", "dk", "variational", "all"}));

    CLI::App* c_curve = app.add_subcommand("curve", "Parametric exponent curve as CSV");
    c_curve->add_option("--gamma", gamma)->check(CLI::PositiveNumber);
    c_curve->add_option("--sigma2", sigma2)->check(CLI::PositiveNumber);
    c_curve->add_option("--nu-max", nu_max, "Sweep end, must be < nu0");
    c_curve->add_option("--steps", steps, "Number of sweep intervals");
    c_curve->add_option("--out", out, "Output file; '-' for stdout");

    double tol_identity = 1e-6, tol_routes = 1e-5, tol_variational = 1e-4;
    CLI::App* c_check = app.add_subcommand("crosscheck", "Run the identity suites");
    c_check->add_option("--ratios", ratios, "Gamma/sigma^2 ratios");
    c_check->add_option("--samples", samples, "Random draws per identity");
    c_check->add_option("--seed", seed);
    c_check->add_option("--tol-identity", tol_identity, "Quadrature identity tolerance");
    c_check->add_option("--tol-routes", tol_routes, "Closed-form route tolerance");
    c_check->add_option("--tol-variational", tol_variational, "Variational route tolerance");
    c_check->add_option("--inject-bug", inject_bug)->group("");  // harness self-test

    CLI::App* c_sim = app.add_subcommand("simulate", "Monte Carlo correct probability");
    c_sim->add_option("--n", n, "Block length")->check(CLI::PositiveNumber);
    c_sim->add_option("--rate", rate, "Rate in nats")->required()->check(CLI::PositiveNumber);
    c_sim->add_option("--gamma", gamma)->check(CLI::PositiveNumber);
    c_sim->add_option("--sigma2", sigma2)->check(CLI::PositiveNumber);
    c_sim->add_option("--theta", theta, "Codebook input variance; defaults to gamma");
    c_sim->add_option("--trials", trials)->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (c_cap->parsed()) return cmd_capacity(gamma, sigma2, format);
        if (c_exp->parsed()) return cmd_exponent(rate, gamma, sigma2, method);
        if (c_curve->parsed()) return cmd_curve(gamma, sigma2, nu_max, steps, out);
        if (c_check->parsed())
            return cmd_crosscheck(ratios, samples, tol_identity, tol_routes, tol_variational,
                                  seed, inject_bug);
        if (c_sim->parsed())
            return cmd_simulate(n, rate, gamma, sigma2, theta < 0.0 ? gamma : theta, trials,
                                seed);
    } catch (const sce::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
