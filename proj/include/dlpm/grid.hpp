#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "dlpm/params.hpp"

namespace dlpm {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// Parity of an axisymmetric field about theta = 0 and theta = pi/2.
// Support functions and their Monge-Ampere densities are even/even;
// the tangential gradient component is odd/even, the axial one even/odd.
enum class parity { even_even, odd_even, even_odd };

// Collocation/quadrature nodes on the polar angle theta in (0, pi/2),
// open at both ends, carrying the 2*omega_{n-2}*sin^{n-2} surface measure.
// Composite Gauss-Legendre panels in a mapped variable; the map density
// sigma + (4u(1-u))^{grading-1} grades nodes toward both endpoints while the
// floor sigma keeps the smallest spacing around 1e-4*pi/2 so second-derivative
// stencils stay well below the roundoff cliff.
struct meridian_grid {
    int n = 2;
    int N = 0;
    double grading = 1.0;
    VectorXd theta;     // strictly increasing, inside (0, pi/2)
    VectorXd w;         // quadrature weights including the surface measure
    VectorXd w_bare;    // d(theta) weights without the measure factor
    VectorXd sin_t, cos_t, cot_t;
    SpMat D1, D2;       // differentiation with even-reflection ghost folding

    // reflection-extended chart shared by stencils and interpolation:
    // 8 ghosts mirrored across each end, ext_side in {-1, 0, +1}
    std::vector<double> ext_t;
    std::vector<int> ext_src, ext_side;

    double measure_total() const { return w.sum(); }
};

using grid_ptr = std::shared_ptr<const meridian_grid>;

grid_ptr make_grid(int n, int N, double grading);

// A rotationally symmetric even scalar field sampled on a grid.
struct axi_fn {
    grid_ptr grid;
    VectorXd values;

    axi_fn() = default;
    explicit axi_fn(grid_ptr g) : grid(std::move(g)), values(VectorXd::Zero(grid ? grid->N : 0)) {}
    axi_fn(grid_ptr g, VectorXd v) : grid(std::move(g)), values(std::move(v)) {}
    axi_fn(grid_ptr g, double c) : grid(std::move(g)), values(VectorXd::Constant(grid ? grid->N : 0, c)) {}
    int size() const { return static_cast<int>(values.size()); }
};

double integrate(const axi_fn& f);

// Derivatives on the grid (fields are even/even about both chart ends).
VectorXd d1(const meridian_grid& g, const VectorXd& v);
VectorXd d2(const meridian_grid& g, const VectorXd& v);

// Evaluate a sampled field at arbitrary angles via local polynomial
// interpolation on the reflection-extended chart. The parity determines the
// sign rules applied when a stencil folds across theta = 0 or pi/2.
double interp_at(const meridian_grid& g, const VectorXd& v, double t, parity par);
VectorXd interp_many(const meridian_grid& g, const VectorXd& v, const VectorXd& t, parity par);

// Least-squares slope of y against x (both already in log space when fitting
// power laws). Returns {slope, intercept}.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dlpm
