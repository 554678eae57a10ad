#include "dlpm/minkowski.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace dlpm {

namespace {

SpMat sparse_identity(int N) {
    SpMat I(N, N);
    I.setIdentity();
    return I;
}

// residual of the curvature equation at the current iterate
VectorXd curvature_defect(const meridian_grid& g, const VectorXd& h, const VectorXd& rhs) {
    VectorXd d2h = g.D2 * h;
    VectorXd d1h = g.D1 * h;
    VectorXd rad1 = d2h + h;
    VectorXd rad2 = (d1h.array() * g.cot_t.array() + h.array()).matrix();
    VectorXd out(h.size());
    for (int i = 0; i < h.size(); ++i)
        out[i] = rad1[i] * std::pow(rad2[i], g.n - 2) - rhs[i];
    return out;
}

axi_fn solve_linear_n2(const meridian_grid& g, const VectorXd& rhs, grid_ptr gp) {
    SpMat A = g.D2 + sparse_identity(g.N);
    A.makeCompressed();
    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_minkowski: linear factorization failed");
    VectorXd h = lu.solve(rhs);
    VectorXd r = rhs - A * h;
    h += lu.solve(r); // one refinement pass, reuses the factorization
    r = rhs - A * h;
    // the raw residual bottoms out at eps * ||A||, and ||A|| carries the
    // 1/dtheta_min^2 stencil scale; certify the solve by backward error
    VectorXd row_sums = VectorXd::Zero(g.N);
    for (int o = 0; o < A.outerSize(); ++o)
        for (SpMat::InnerIterator it(A, o); it; ++it) row_sums[it.row()] += std::abs(it.value());
    double row_norm = row_sums.maxCoeff();
    double denom = row_norm * h.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
    double backward = r.cwiseAbs().maxCoeff() / std::max(denom, 1e-300);
    if (backward > 1e-12) {
        std::ostringstream os;
        os << "solve_minkowski: linear backward error " << backward << " above 1e-12";
        throw std::runtime_error(os.str());
    }
    return axi_fn(gp, std::move(h));
}

} // namespace

axi_fn rhs_classical(const problem_params& pp, grid_ptr g) {
    check_admissible(pp);
    if (!(pp.epsilon > 0.0 && pp.epsilon <= 1.0))
        throw std::invalid_argument("epsilon inside (0, 1] violated");
    double expo = 0.5 * (-pp.p - pp.delta - 1.0 - pp.beta);
    axi_fn out(g);
    for (int i = 0; i < g->N; ++i) {
        double s = g->sin_t[i], c = g->cos_t[i];
        double m2 = pp.epsilon * pp.epsilon * s * s + c * c;
        out.values[i] = std::pow(s, pp.alpha) * std::pow(c, pp.beta) * std::pow(m2, expo);
    }
    return out;
}

axi_fn solve_minkowski(const axi_fn& g) {
    const meridian_grid& gr = *g.grid;
    if (g.values.minCoeff() < 0.0)
        throw std::invalid_argument("solve_minkowski: g >= 0 violated");
    double gmax = g.values.maxCoeff();
    if (!(gmax > 0.0)) throw std::invalid_argument("solve_minkowski: g not identically 0 violated");

    if (gr.n == 2) return solve_linear_n2(gr, g.values, g.grid);

    // lifted initial guess: each curvature factor carries ~ g^{1/(n-1)}
    VectorXd lifted =
        g.values.array().pow(1.0 / (gr.n - 1)).matrix();
    VectorXd h = solve_linear_n2(gr, lifted, g.grid).values;

    SpMat I = sparse_identity(gr.N);
    SpMat cotD1 = (SpMat)(VectorXd(gr.cot_t).asDiagonal() * gr.D1);
    double res_prev = curvature_defect(gr, h, g.values).cwiseAbs().maxCoeff();
    int iter = 0;
    for (; iter < 40; ++iter) {
        if (res_prev / gmax <= 1e-12) break;
        VectorXd d2h = gr.D2 * h, d1h = gr.D1 * h;
        VectorXd rad1 = d2h + h;
        VectorXd rad2 = (d1h.array() * gr.cot_t.array() + h.array()).matrix();
        VectorXd w1(gr.N), w2(gr.N);
        for (int i = 0; i < gr.N; ++i) {
            w1[i] = std::pow(rad2[i], gr.n - 2);
            w2[i] = (gr.n - 2) * rad1[i] * std::pow(rad2[i], gr.n - 3);
        }
        SpMat J = SpMat(w1.asDiagonal() * (gr.D2 + I)) + SpMat(w2.asDiagonal() * (cotD1 + I));
        J.makeCompressed();
        Eigen::SparseLU<SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_minkowski: Newton factorization failed");
        VectorXd defect = curvature_defect(gr, h, g.values);
        VectorXd step = lu.solve(-defect);

        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 40; ++halve) {
            double res_try = curvature_defect(gr, h + t * step, g.values).cwiseAbs().maxCoeff();
            if (res_try <= (1.0 - 1e-4 * t) * res_prev) {
                h += t * step;
                res_prev = res_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    double rel = res_prev / gmax;
    if (rel > 1e-6) {
        std::ostringstream os;
        os << "solve_minkowski: stagnation after " << iter << " damped iterations, residual "
           << rel;
        throw std::runtime_error(os.str());
    }

    // final iterate must be a genuine support function
    VectorXd rad1 = gr.D2 * h + h;
    VectorXd rad2 = ((gr.D1 * h).array() * gr.cot_t.array() + h.array()).matrix();
    double floor = -1e-9 * h.maxCoeff();
    if (h.minCoeff() <= 0.0 || rad1.minCoeff() < floor || rad2.minCoeff() < floor)
        throw std::runtime_error("solve_minkowski: convexity lost in the final iterate");
    return axi_fn(g.grid, std::move(h));
}

envelope_report verify_h_bounds(const std::vector<double>& eps_list,
                                const std::vector<axi_fn>& h_list) {
    if (eps_list.size() != h_list.size())
        throw std::invalid_argument("verify_h_bounds: eps/solution count mismatch");
    if (eps_list.empty()) throw std::invalid_argument("verify_h_bounds: empty sweep");
    envelope_report rep;
    for (size_t k = 0; k < eps_list.size(); ++k) {
        rep.eps.push_back(eps_list[k]);
        rep.h_min.push_back(h_list[k].values.minCoeff());
        rep.h_max.push_back(h_list[k].values.maxCoeff());
    }
    if (eps_list.size() >= 3) {
        std::vector<double> le, lmin, lmax;
        for (size_t k = 0; k < eps_list.size(); ++k) {
            le.push_back(std::log(eps_list[k]));
            lmin.push_back(std::log(rep.h_min[k]));
            lmax.push_back(std::log(rep.h_max[k]));
        }
        rep.trend_min = fit_line(le, lmin).first;
        rep.trend_max = fit_line(le, lmax).first;
        rep.has_trend = true;
        rep.pass = std::abs(rep.trend_min) <= 0.05 && std::abs(rep.trend_max) <= 0.05;
    }
    return rep;
}

} // namespace dlpm
