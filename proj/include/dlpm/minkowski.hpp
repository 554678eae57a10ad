#pragma once
#include <vector>

#include "dlpm/body.hpp"
#include "dlpm/params.hpp"

namespace dlpm {

// curvature data of the squeezed construction on the meridian chart:
// sin^alpha |cos|^beta (eps^2 sin^2 + cos^2)^{(-p-delta-1-beta)/2}
axi_fn rhs_classical(const problem_params& pp, grid_ptr g);

// solve (h'' + h)(h' cot(theta) + h)^{n-2} = g in the even class.
// n = 2 is a single sparse linear solve; higher n runs damped Newton
// started from a lifted two-dimensional solve of g^{1/(n-1)}.
axi_fn solve_minkowski(const axi_fn& g);

struct envelope_report {
    std::vector<double> eps;
    std::vector<double> h_min, h_max;
    double trend_min = 0;
    double trend_max = 0;
    bool has_trend = false;
    bool pass = false;
};

// per-eps solution envelopes and their log-log drift against eps;
// fewer than three sweep points yields a report without a trend
envelope_report verify_h_bounds(const std::vector<double>& eps_list,
                                const std::vector<axi_fn>& h_list);

} // namespace dlpm
