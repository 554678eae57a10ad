#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlpm {

// Scalar index set (n, p, q, alpha, beta, delta, epsilon) for the dual
// L_p-Minkowski problem restricted to the rotationally symmetric even class.
struct problem_params {
    int n = 2;
    double p = -1.0;
    double q = 0.5;
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double epsilon = 0.1;
};

inline double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// |S^{n-2}|, the measure of the azimuthal factor in the meridian reduction.
inline double omega_axis(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
}

inline double sphere_area(int n) { return n * unit_ball_volume(n); }

// Admissibility of the standing assumptions. Throws with the violated
// inequality spelled out, so CLI errors can echo it verbatim.
inline void check_admissible(const problem_params& pp, bool for_construction = false) {
    if (pp.n < 2) throw std::invalid_argument("n >= 2 violated");
    if (!(pp.p < 0.0)) throw std::invalid_argument("p < 0 violated");
    if (!(pp.q > 0.0)) throw std::invalid_argument("q > 0 violated");
    if (pp.alpha < 0.0) throw std::invalid_argument("alpha >= 0 violated");
    if (pp.beta < 0.0) throw std::invalid_argument("beta >= 0 violated");
    if (for_construction) {
        if (!(pp.epsilon > 0.0 && pp.epsilon < 0.5))
            throw std::invalid_argument("epsilon inside (0, 1/2) violated");
        if (!(pp.delta > 0.0 && pp.delta < -pp.p))
            throw std::invalid_argument("delta inside (0, -p) violated");
    }
}

} // namespace dlpm
