#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

// Grid-based densities for the variational functionals. A DiscretizedDensity
// carries probability mass per node under a fixed quadrature rule, so both
// expectations (sums of masses) and pointwise density values (mass / cell
// weight) are available.

namespace sce {

enum class QuadRule { Trapezoid, GaussLegendre };

struct QuadratureSpec {
    double half_width = 10.0;  // support truncation, in combined standard deviations
    int nodes_per_axis = 128;  // >= 64 for acceptance runs
    QuadRule rule = QuadRule::GaussLegendre;
};

// Nodes and positive quadrature weights on an interval [a, b].
struct Grid1D {
    std::vector<double> node;
    std::vector<double> weight;

    static Grid1D make(double a, double b, int n, QuadRule rule);
};

struct DiscretizedDensity {
    std::vector<double> node;  // strictly increasing
    std::vector<double> mass;  // nonnegative, sums to 1 within 1e-9
    std::vector<double> cell;  // quadrature weight per node, positive

    std::size_t size() const { return node.size(); }
    double density(std::size_t i) const { return mass[i] / cell[i]; }
    double mean() const;
    double variance() const;

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

// mass_i = f(node_i) * cell_i on the given grid; does not renormalize.
template <class F>
DiscretizedDensity density_from_function(const Grid1D& grid, F&& f) {
    DiscretizedDensity d;
    d.node = grid.node;
    d.cell = grid.weight;
    d.mass.resize(grid.node.size());
    for (std::size_t i = 0; i < grid.node.size(); ++i)
        d.mass[i] = f(grid.node[i]) * grid.weight[i];
    return d;
}

// N(mean, variance) truncated at spec.half_width standard deviations.
DiscretizedDensity gaussian_density(double mean, double variance, const QuadratureSpec& spec);

// Uniform on [a, b].
DiscretizedDensity uniform_density(double a, double b, const QuadratureSpec& spec);

// Equal-weight two-component Gaussian mixture.
DiscretizedDensity bimodal_density(double m1, double v1, double m2, double v2,
                                   const QuadratureSpec& spec);

// Two-column CSV (node,weight) for debugging; import reconstructs trapezoid
// cell weights from the node spacing.
void write_density_csv(const DiscretizedDensity& d, std::ostream& out);
DiscretizedDensity read_density_csv(std::istream& in);
void write_density_csv_file(const DiscretizedDensity& d, const std::string& path);
DiscretizedDensity read_density_csv_file(const std::string& path);

}  // namespace sce
