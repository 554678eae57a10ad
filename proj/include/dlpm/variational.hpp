#pragma once

#include <utility>
#include <vector>

#include "dlpm/body.hpp"
#include "dlpm/grid.hpp"
#include "dlpm/params.hpp"

namespace dlpm {

// J[g] = integral of f g^p over the sphere, the constrained objective
double functional_J(const axi_fn& g, const axi_fn& f, double p);

// support function of the hull body of g, clamped nodewise so it never
// exceeds g (hull evaluation can overshoot near facet tangencies)
axi_fn convexify(const axi_fn& g);

// scale g so its hull body has q-th dual volume kappa_n
axi_fn normalize_to_constraint(const axi_fn& g, double q);

struct maximize_opts {
    double tol = 1e-4;       // stop once the scaled multiplier defect is below this
    int max_iters = 400;
    double stall_rel = 1e-12;
};

struct maximizer_state {
    axi_fn log_g;  // current candidate, log values
    axi_fn body;   // the candidate itself: hulled and constraint-normalized
    double J_value = 0.0;
    double constraint_gap = 0.0;  // hull dual volume minus kappa_n at exit
    int iteration = 0;
    double rel_defect = 1.0;      // scaled multiplier defect at exit
    double worst_gap = 0.0;       // max relative constraint drift over accepted iterates
    std::vector<double> J_trace;  // accepted objective values, nondecreasing
};

// projected ascent: hull the candidate, step along the preconditioned
// multiplier defect in log space, rescale back onto the constraint set
maximizer_state maximize(const axi_fn& f, double p, double q, const axi_fn& init,
                         const maximize_opts& opts = {});

struct solution_record {
    axi_fn h;           // constrained maximizer
    double c = 0.0;     // multiplier: integral of f h^p over n kappa_n
    axi_fn H;           // c^{1/(q-p)} h, the equation candidate
    double residual = 0.0;
    double dual_volume_H = 0.0;
};

solution_record extract_solution(const maximizer_state& st, const axi_fn& f, double p,
                                 double q);

// sup defect of H^{1-p} |grad H|^{q-n} (curvature product) against f,
// relative to f nodewise; nodes with f below 1e-12 of its max are excluded
double residual(const axi_fn& H, const axi_fn& f, double p, double q);

// damped Newton on the discretized equation from a near-solution start
axi_fn newton_local_solve(const axi_fn& f, double p, double q, const axi_fn& H0,
                          double tol = 1e-8);

// first variation of the q-th dual volume along direction: central finite
// difference against the closed-form rate, returned as (fd, formula)
std::pair<double, double> variation_check(const axi_fn& h, const axi_fn& direction, double q,
                                          double step);

} // namespace dlpm
