#include "sce/quadrature.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sce {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre_reference(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace

Grid1D Grid1D::make(double a, double b, int n, QuadRule rule) {
    if (!(b > a)) throw std::invalid_argument("Grid1D: need b > a");
    if (n < 2) throw std::invalid_argument("Grid1D: need at least 2 nodes");
    Grid1D grid;
    grid.node.resize(n);
    grid.weight.resize(n);
    if (rule == QuadRule::Trapezoid) {
        const double h = (b - a) / (n - 1);
        for (int i = 0; i < n; ++i) {
            grid.node[i] = a + h * i;
            grid.weight[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
        }
    } else {
        std::vector<double> x, w;
        gauss_legendre_reference(n, x, w);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < n; ++i) {
            grid.node[i] = mid + half * x[i];
            grid.weight[i] = half * w[i];
        }
    }
    return grid;
}

double DiscretizedDensity::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += node[i] * mass[i];
    return m;
}

double DiscretizedDensity::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i) v += (node[i] - m) * (node[i] - m) * mass[i];
    return v;
}

void DiscretizedDensity::validate() const {
    if (node.size() < 2 || node.size() != mass.size() || node.size() != cell.size())
        throw std::invalid_argument("DiscretizedDensity: inconsistent sizes");
    double total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (i + 1 < size() && !(node[i] < node[i + 1]))
            throw std::invalid_argument("DiscretizedDensity: grid must be strictly increasing");
        if (!(mass[i] >= 0.0))
            throw std::invalid_argument("DiscretizedDensity: weights must be >= 0");
        if (!(cell[i] > 0.0))
            throw std::invalid_argument("DiscretizedDensity: cell weights must be > 0");
        total += mass[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("DiscretizedDensity: weights must sum to 1 within 1e-9");
}

DiscretizedDensity gaussian_density(double mean, double variance, const QuadratureSpec& spec) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_density: variance must be > 0");
    const double sd = std::sqrt(variance);
    const Grid1D grid = Grid1D::make(mean - spec.half_width * sd, mean + spec.half_width * sd,
                                     spec.nodes_per_axis, spec.rule);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
    return density_from_function(grid, [&](double x) {
        const double z = x - mean;
        return norm * std::exp(-z * z / (2.0 * variance));
    });
}

DiscretizedDensity uniform_density(double a, double b, const QuadratureSpec& spec) {
    const Grid1D grid = Grid1D::make(a, b, spec.nodes_per_axis, spec.rule);
    const double h = 1.0 / (b - a);
    return density_from_function(grid, [&](double) { return h; });
}

DiscretizedDensity bimodal_density(double m1, double v1, double m2, double v2,
                                   const QuadratureSpec& spec) {
    const double lo = std::min(m1 - spec.half_width * std::sqrt(v1),
                               m2 - spec.half_width * std::sqrt(v2));
    const double hi = std::max(m1 + spec.half_width * std::sqrt(v1),
                               m2 + spec.half_width * std::sqrt(v2));
    const Grid1D grid = Grid1D::make(lo, hi, spec.nodes_per_axis, spec.rule);
    const double n1 = 1.0 / std::sqrt(2.0 * std::numbers::pi * v1);
    const double n2 = 1.0 / std::sqrt(2.0 * std::numbers::pi * v2);
    return density_from_function(grid, [&](double x) {
        const double z1 = x - m1, z2 = x - m2;
        return 0.5 * (n1 * std::exp(-z1 * z1 / (2.0 * v1)) + n2 * std::exp(-z2 * z2 / (2.0 * v2)));
    });
}

void write_density_csv(const DiscretizedDensity& d, std::ostream& out) {
    out << "node,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.node[i], d.mass[i]);
        out << buf;
    }
}

DiscretizedDensity read_density_csv(std::istream& in) {
    DiscretizedDensity d;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("density csv: empty input");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::invalid_argument("density csv: malformed row");
        d.node.push_back(std::stod(a));
        d.mass.push_back(std::stod(b));
    }
    if (d.node.size() < 2) throw std::invalid_argument("density csv: need at least 2 rows");
    d.cell.resize(d.node.size());
    for (std::size_t i = 0; i < d.node.size(); ++i) {
        const double left = (i == 0) ? d.node[1] - d.node[0] : d.node[i] - d.node[i - 1];
        const double right =
            (i + 1 == d.node.size()) ? d.node[i] - d.node[i - 1] : d.node[i + 1] - d.node[i];
        d.cell[i] = 0.5 * (left + right);
    }
    d.validate();
    return d;
}

void write_density_csv_file(const DiscretizedDensity& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    write_density_csv(d, out);
}

DiscretizedDensity read_density_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    return read_density_csv(in);
}

}  // namespace sce
