#pragma once

#include <utility>
#include <vector>

#include "dlpm/grid.hpp"
#include "dlpm/params.hpp"
#include "dlpm/variational.hpp"

namespace dlpm {

// One squashed-body experiment at a fixed eccentricity.  Invariants when
// produced by run_pipeline: both residuals <= 1e-3, dv_variational > 0,
// f_l1 > 0.
struct construction_record {
    problem_params params;
    double h_min = 0.0;               // envelope of the round-problem solution
    double h_max = 0.0;
    double dv_constructed = 0.0;      // q-th dual volume of the squashed body
    double dv_variational = 0.0;      // and of the maximizer's body
    double f_l1 = 0.0;
    double residual_constructed = 0.0;
    double residual_variational = 0.0;
    bool s0_pass = false;
    double solution_gap = 0.0;        // relative sup distance between the two
};

// Equatorial band on which the gradient map keeps a radial component
// bounded away from zero.
struct s0_region {
    double threshold = 0.0;           // band edge in cos(theta), in (0, cos(pi/4)]
    double C = 1.0;                   // shape bound max(max h, 1/min h)
    std::vector<int> mask;            // node indices with cos(theta) < threshold
};

// Mid-window exponents alpha, beta, delta for the squashed data.  Throws
// when the window is empty; q < 1 needs p < q - 1.
problem_params choose_parameters(int n, double p, double q);

// Angle with tan(theta_eps) = tan(theta) / eps.  theta in [0, pi/2],
// eps in (0, 1].  Fixes the endpoints and increases in both arguments'
// natural senses.
double pulled_angle(double theta, double eps);

// Support function of the squashed body, scaled so its constraint volume
// stays bounded: eps^{(q+delta-1)/(q-p)} |M^{-1}x| h(x_eps) with
// M = diag(eps, .., eps, 1).
axi_fn transform_support(const axi_fn& h, double eps, double p, double q,
                         double delta);

// Right-hand side that the squashed body solves exactly.  Uses alpha, beta,
// delta, epsilon from pp; h is the round-problem solution.
axi_fn f_epsilon(const axi_fn& h, const problem_params& pp);

// Mismatch between the two sides of the change-of-variables identity for
// the curvature determinant under x -> Mx/|Mx|, as a fraction of the larger
// side's sup.  Small for any smooth convex h; zero in exact arithmetic.
double transform_identity_check(const axi_fn& h, double eps);

// Equatorial-band gradient test: every h in the sweep must keep
// |xi_eq| > 1/(2C) on the band determined by C.
std::pair<s0_region, bool> s0_checks(const std::vector<axi_fn>& h_sweep,
                                     double C);

struct decay_report {
    double predicted = 0.0;       // model decay exponent of dv_constructed
    double fitted = 0.0;          // raw log-log slope over the sweep
    double fitted_logdiv = 0.0;   // slope with the |log eps| factor divided
                                  // out; equals fitted unless q = 1
    double f_l1_slope = 0.0;
    bool dv_ok = false;           // compared exponent within 15% of predicted
    bool f_l1_ok = false;         // f_l1 does not decay: slope >= -0.05
    bool lower_bound_ok = false;  // dv_variational >= its data lower bound
                                  // in every record
};

// Requires >= 4 records on a geometric eps ladder.
decay_report decay_checks(const std::vector<construction_record>& records);

struct pipeline_options {
    int n = 2;
    int N = 1024;
    double grading = 2.0;
    maximize_opts ascent;
    double newton_tol = 1e-5;   // polish target; the Jacobian-solve noise
                                // floor sits above 1e-6 at n = 3, N = 1024
};

struct pipeline_verdict {
    bool pass = false;
    double smallest_eps = 0.0;
    double ratio = 0.0;           // dv_variational / dv_constructed at smallest eps
    double gap = 0.0;
};

struct pipeline_result {
    std::vector<construction_record> records;
    pipeline_verdict verdict;
};

// Full two-solutions experiment over an eps sweep: solve the round problem,
// squash, then run the constrained ascent on the squashed data and compare
// the two solutions.  Stage failures propagate with the stage name and eps.
pipeline_result run_pipeline(double p, double q,
                             const std::vector<double>& eps_list,
                             const pipeline_options& opts = {});

} // namespace dlpm
