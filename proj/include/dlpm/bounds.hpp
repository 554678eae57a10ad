#pragma once
#include <string>
#include <vector>

#include "dlpm/body.hpp"
#include "dlpm/params.hpp"

namespace dlpm {

// a > 3 / [1/3, 3] / a < 1/3: the three bands of the axis-ratio parameter
enum class band { A1, A2, A3 };

band classify_band(double a);

// power law c * a^exponent * |log a|^log_power; degenerate marks exponent 0,
// which can occur outside the admissible (alpha, beta) window and is then
// reported rather than asserted
struct exponent_law {
    double exponent = 0;
    double log_power = 0;
    bool degenerate = false;
};

struct decay_point {
    double a = 0, r = 0, F = 0;
};

struct slope_fit {
    std::vector<decay_point> points;
    double fitted_slope = 0;
    double predicted_slope = 0;
    double predicted_log_power = 0;
    double rel_error = 0;
    bool degenerate = false;
    bool monotone = true;
    bool ok = false;
    std::string note;
};

// sphere integral of |A^{-1}x|^{-q} for the rotational ellipsoid family;
// equals the sphere area when e is the unit ball
double normalization_integral(int n, const rot_ellipsoid& e, double q);

// r with normalization_integral(n, {r, a}, q) == target (exact in r^q)
double solve_r_for_normalization(int n, double a, double q, double target);

// sphere integral of |x'|^alpha |x_n|^beta |Ax|^p
double F_of_A(int n, const rot_ellipsoid& e, double p, double alpha, double beta);

// envelope constant for the normalization window
double lambda_bound(int n, double q);

exponent_law predicted_r_exponent(int n, double q, band b);
exponent_law predicted_F_exponent(const problem_params& pp, band b);

// sweep a (>= 4 points, a >= 1e2 on A1 / a <= 1e-2 on A3), r pinned by the
// normalization target, fit log F against log a with any predicted log
// factor divided out, and compare against the tabulated exponent
slope_fit verify_decay(const problem_params& pp, band b, const std::vector<double>& a_sweep);

// max/min of normalized F over the middle band
double band_bound_ratio(const problem_params& pp, int samples = 13);

std::vector<double> geometric_sweep(double lo, double hi, int count);

} // namespace dlpm
