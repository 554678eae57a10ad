#include "dlpm/variational.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace dlpm {

namespace {

void require_same_grid(const axi_fn& a, const axi_fn& b, const char* who) {
    if (a.grid.get() != b.grid.get())
        throw std::invalid_argument(std::string(who) + ": mismatched grids");
}

// |grad H|^{q-n} times the curvature product, the density of the dual
// volume variation; also the multiplier-side weight of the optimality system
VectorXd dual_weight(const axi_fn& h, double q) {
    const meridian_grid& g = *h.grid;
    VectorXd dh = g.D1 * h.values;
    VectorXd rad1 = g.D2 * h.values + h.values;
    VectorXd rad2 = (dh.array() * g.cot_t.array() + h.values.array()).matrix();
    VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) {
        double s2 = dh[i] * dh[i] + h.values[i] * h.values[i];
        out[i] = std::pow(s2, 0.5 * (q - g.n)) * rad1[i] * std::pow(rad2[i], g.n - 2);
    }
    return out;
}

VectorXd equation_defect(const axi_fn& H, const axi_fn& f, double p, double q) {
    const meridian_grid& g = *H.grid;
    VectorXd w = dual_weight(H, q);
    VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i)
        out[i] = std::pow(H.values[i], 1.0 - p) * w[i] - f.values[i];
    return out;
}

// relative sup defect over nodes carrying data
double equation_merit(const axi_fn& H, const axi_fn& f, double p, double q) {
    VectorXd d = equation_defect(H, f, p, q);
    double fmax = f.values.maxCoeff();
    double m = 0.0;
    for (int i = 0; i < f.values.size(); ++i)
        if (f.values[i] > 1e-12 * fmax) m = std::max(m, std::abs(d[i]) / f.values[i]);
    return m;
}

double hull_dual_volume(const axi_fn& g, double q) {
    return dual_volume(alexandrov_radial(g), q);
}

} // namespace

double functional_J(const axi_fn& g, const axi_fn& f, double p) {
    require_same_grid(g, f, "functional_J");
    if (!(p < 0.0)) throw std::invalid_argument("functional_J: p < 0 violated");
    if (!(g.values.minCoeff() > 0.0))
        throw std::invalid_argument("functional_J: g > 0 violated");
    axi_fn integrand(g.grid);
    integrand.values =
        (f.values.array() * g.values.array().pow(p)).matrix();
    return integrate(integrand);
}

axi_fn convexify(const axi_fn& g) {
    axi_fn hull = support_from_radial(alexandrov_radial(g));
    hull.values = hull.values.cwiseMin(g.values);
    return hull;
}

axi_fn normalize_to_constraint(const axi_fn& g, double q) {
    if (!(g.values.minCoeff() > 0.0))
        throw std::invalid_argument("normalize_to_constraint: g > 0 violated");
    double v = hull_dual_volume(g, q);
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::runtime_error("normalize_to_constraint: hull dual volume not positive");
    double lambda = std::pow(unit_ball_volume(g.grid->n) / v, 1.0 / q);
    axi_fn out(g.grid);
    out.values = lambda * g.values;
    return out;
}

maximizer_state maximize(const axi_fn& f, double p, double q, const axi_fn& init,
                         const maximize_opts& opts) {
    require_same_grid(f, init, "maximize");
    const grid_ptr gp = f.grid;
    const meridian_grid& g = *gp;
    if (!(p < 0.0)) throw std::invalid_argument("maximize: p < 0 violated");
    if (!(q > 0.0)) throw std::invalid_argument("maximize: q > 0 violated");
    if (f.values.minCoeff() < 0.0) throw std::invalid_argument("maximize: f >= 0 violated");
    if (!(integrate(f) > 0.0))
        throw std::invalid_argument("maximize: ||f||_1 > 0 violated");
    if (!(init.values.minCoeff() > 0.0))
        throw std::invalid_argument("maximize: init > 0 violated");

    const double kappa = unit_ball_volume(g.n);
    const double area = sphere_area(g.n);

    // smoothing preconditioner: inverse of (identity minus Laplacian)
    SpMat I(g.N, g.N);
    I.setIdentity();
    SpMat L = I;
    L -= g.D2;
    if (g.n > 2) L -= SpMat(((g.n - 2) * g.cot_t).asDiagonal() * g.D1);
    L.makeCompressed();
    Eigen::SparseLU<SpMat> smooth(L);
    if (smooth.info() != Eigen::Success)
        throw std::runtime_error("maximize: preconditioner factorization failed");

    auto run = [&](const axi_fn& start) {
        maximizer_state st;
        axi_fn h = normalize_to_constraint(convexify(start), q);
        double J = functional_J(h, f, p);
        st.J_trace.push_back(J);
        st.worst_gap = std::abs(hull_dual_volume(h, q) - kappa) / kappa;

        double tau_prev = 0.5;
        double rel = std::numeric_limits<double>::infinity();
        int iter = 0;
        for (; iter < opts.max_iters; ++iter) {
            // multiplier defect: f h^{p-1} - c w with c = J/(n kappa_n)
            VectorXd w = dual_weight(h, q);
            double c = J / area;
            VectorXd defect(g.N);
            double scale = 0.0;
            double fmax = f.values.maxCoeff();
            rel = 0.0;
            for (int i = 0; i < g.N; ++i) {
                double lead = f.values[i] * std::pow(h.values[i], p - 1.0);
                defect[i] = lead - c * w[i];
                if (f.values[i] > 1e-12 * fmax) {
                    scale = std::max(scale, std::abs(lead));
                    rel = std::max(rel, std::abs(defect[i]));
                }
            }
            rel = scale > 0.0 ? rel / scale : 0.0;
            if (rel <= opts.tol) break;

            // ascent in log space along the negated, smoothed defect
            VectorXd phi = smooth.solve(-defect);
            double pmax = phi.cwiseAbs().maxCoeff();
            if (!(pmax > 0.0)) break;
            phi /= pmax;
            VectorXd logh = h.values.array().log().matrix();

            double tau = std::min(2.0 * tau_prev, 1.0);
            bool accepted = false;
            double best_J = -std::numeric_limits<double>::infinity();
            axi_fn best_h;
            for (int halve = 0; halve < 60; ++halve, tau *= 0.5) {
                axi_fn raw(gp);
                raw.values = (logh + tau * phi).array().exp().matrix();
                axi_fn cand = normalize_to_constraint(convexify(raw), q);
                double J_c = functional_J(cand, f, p);
                if (!std::isfinite(J_c)) continue;
                if (J_c > J + std::abs(J) * opts.stall_rel) {
                    h = cand;
                    J = J_c;
                    tau_prev = std::max(tau, 1e-8);
                    accepted = true;
                    break;
                }
                if (J_c > best_J) {
                    best_J = J_c;
                    best_h = cand;
                }
            }
            if (accepted) {
                st.J_trace.push_back(J);
                st.worst_gap = std::max(
                    st.worst_gap, std::abs(hull_dual_volume(h, q) - kappa) / kappa);
                continue;
            }
            // no step improves J beyond the stall threshold: either the
            // iterate is (discretely) critical, or every trial was junk
            if (best_J >= J - std::abs(J) * 1e-12) {
                if (best_J > J) {
                    h = best_h;
                    J = best_J;
                    st.J_trace.push_back(J);
                }
                break;
            }
            std::ostringstream os;
            os << "maximize: line search collapsed after 60 halvings at iteration " << iter
               << ", J = " << J << ", defect = " << rel;
            throw std::runtime_error(os.str());
        }

        st.body = h;
        st.log_g = axi_fn(gp, VectorXd(h.values.array().log().matrix()));
        st.J_value = J;
        st.iteration = iter;
        st.rel_defect = rel;
        st.constraint_gap = hull_dual_volume(h, q) - kappa;
        return st;
    };

    maximizer_state st = run(init);

    // the constant body is always feasible; never return anything worse
    double J_ball = functional_J(normalize_to_constraint(axi_fn(gp, 1.0), q), f, p);
    if (st.J_value < J_ball - 1e-12 * std::max(1.0, std::abs(J_ball))) {
        maximizer_state st_ball = run(axi_fn(gp, 1.0));
        if (st_ball.J_value > st.J_value) return st_ball;
    }
    return st;
}

solution_record extract_solution(const maximizer_state& st, const axi_fn& f, double p,
                                 double q) {
    require_same_grid(st.body, f, "extract_solution");
    const meridian_grid& g = *st.body.grid;
    solution_record rec;
    rec.h = st.body;
    rec.c = functional_J(rec.h, f, p) / sphere_area(g.n);
    rec.H = axi_fn(st.body.grid,
                   VectorXd(std::pow(rec.c, 1.0 / (q - p)) * rec.h.values));
    rec.residual = equation_merit(rec.H, f, p, q);
    rec.dual_volume_H = hull_dual_volume(rec.H, q);
    return rec;
}

double residual(const axi_fn& H, const axi_fn& f, double p, double q) {
    require_same_grid(H, f, "residual");
    const meridian_grid& g = *H.grid;
    if (!(H.values.minCoeff() > 0.0))
        throw std::invalid_argument("residual: H > 0 violated");
    VectorXd rad1 = g.D2 * H.values + H.values;
    VectorXd rad2 = ((g.D1 * H.values).array() * g.cot_t.array() + H.values.array()).matrix();
    double floor = -1e-9 * H.values.maxCoeff();
    if (rad1.minCoeff() < floor || rad2.minCoeff() < floor)
        throw std::invalid_argument("residual: H not convex");
    return equation_merit(H, f, p, q);
}

axi_fn newton_local_solve(const axi_fn& f, double p, double q, const axi_fn& H0,
                          double tol) {
    require_same_grid(f, H0, "newton_local_solve");
    const grid_ptr gp = f.grid;
    const meridian_grid& g = *gp;
    if (!(H0.values.minCoeff() > 0.0))
        throw std::invalid_argument("newton_local_solve: H0 > 0 violated");
    double merit = equation_merit(H0, f, p, q);
    if (!(merit < 0.5)) {
        std::ostringstream os;
        os << "newton_local_solve: initial residual " << merit << " not below 0.5";
        throw std::invalid_argument(os.str());
    }

    SpMat I(g.N, g.N);
    I.setIdentity();
    VectorXd H = H0.values;
    int iter = 0;
    for (; iter < 60 && merit > tol; ++iter) {
        VectorXd dH = g.D1 * H;
        VectorXd rad1 = g.D2 * H + H;
        VectorXd rad2 = (dH.array() * g.cot_t.array() + H.array()).matrix();
        VectorXd R(g.N), a0(g.N), a1(g.N), a2(g.N);
        for (int i = 0; i < g.N; ++i) {
            double s2 = dH[i] * dH[i] + H[i] * H[i];
            double A = std::pow(H[i], 1.0 - p);
            double B = std::pow(s2, 0.5 * (q - g.n));
            double Bp = (q - g.n) * std::pow(s2, 0.5 * (q - g.n) - 1.0);
            double r2a = std::pow(rad2[i], g.n - 2);
            double r2b = g.n >= 3 ? (g.n - 2) * rad1[i] * std::pow(rad2[i], g.n - 3) : 0.0;
            double C = rad1[i] * r2a;
            R[i] = A * B * C - f.values[i];
            a2[i] = A * B * r2a;
            a1[i] = A * B * r2b * g.cot_t[i] + A * Bp * dH[i] * C;
            a0[i] = (1.0 - p) * std::pow(H[i], -p) * B * C + A * Bp * H[i] * C
                    + A * B * (r2a + r2b);
        }
        SpMat J = SpMat(a0.asDiagonal() * I) + SpMat(a1.asDiagonal() * g.D1)
                  + SpMat(a2.asDiagonal() * g.D2);
        J.makeCompressed();
        Eigen::SparseLU<SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("newton_local_solve: Jacobian factorization failed");
        VectorXd step = lu.solve(-R);

        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 40; ++halve, t *= 0.5) {
            VectorXd H_try = H + t * step;
            if (H_try.minCoeff() <= 0.0) continue;
            double m_try = equation_merit(axi_fn(gp, H_try), f, p, q);
            if (m_try <= (1.0 - 1e-4 * t) * merit) {
                H = H_try;
                merit = m_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (merit > tol) {
        std::ostringstream os;
        os << "newton_local_solve: diverged from basin, residual " << merit << " after "
           << iter << " iterations";
        throw std::runtime_error(os.str());
    }
    axi_fn out(gp, std::move(H));
    residual(out, f, p, q); // certifies positivity and convexity of the result
    return out;
}

std::pair<double, double> variation_check(const axi_fn& h, const axi_fn& direction, double q,
                                          double step) {
    require_same_grid(h, direction, "variation_check");
    const meridian_grid& g = *h.grid;
    axi_fn hp(h.grid, VectorXd(h.values + step * direction.values));
    axi_fn hm(h.grid, VectorXd(h.values - step * direction.values));
    double fd = (hull_dual_volume(hp, q) - hull_dual_volume(hm, q)) / (2.0 * step);
    axi_fn integrand(h.grid);
    integrand.values =
        (direction.values.array() * dual_weight(h, q).array()).matrix();
    double formula = (q / g.n) * integrate(integrand);
    return {fd, formula};
}

} // namespace dlpm
