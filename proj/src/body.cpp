#include "dlpm/body.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dlpm {

namespace {

double eq_axis(const rot_ellipsoid& E, int n) { return E.r * std::pow(E.a, 1.0 / n); }
double polar_axis(const rot_ellipsoid& E, int n) { return E.r * std::pow(E.a, (1.0 - n) / n); }

// Evaluate an even profile at any angle by folding into [0, pi/2].
double eval_folded(const meridian_grid& g, const VectorXd& v, double t) {
    t = std::abs(t);
    if (t > M_PI) t = 2.0 * M_PI - t;
    if (t > 0.5 * M_PI) t = M_PI - t;
    return interp_at(g, v, t, parity::even_even);
}

struct fold_table {
    std::vector<double> t, v;
};

// All reflections of the meridian samples into (-pi/2, pi].
fold_table build_fold_table(const axi_fn& f) {
    const auto& g = *f.grid;
    int N = g.N;
    fold_table ft;
    ft.t.resize(3 * N);
    ft.v.resize(3 * N);
    for (int i = 0; i < N; ++i) {
        ft.t[i] = -g.theta[N - 1 - i];
        ft.v[i] = f.values[N - 1 - i];
        ft.t[N + i] = g.theta[i];
        ft.v[N + i] = f.values[i];
        ft.t[2 * N + i] = M_PI - g.theta[N - 1 - i];
        ft.v[2 * N + i] = f.values[N - 1 - i];
    }
    return ft;
}

constexpr double golden = 0.6180339887498949;

template <class F>
double golden_min(F&& phi, double lo, double hi, int iters) {
    double a = lo, b = hi;
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    for (int k = 0; k < iters; ++k) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = phi(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

// Upper bound for the max of a locally concave function given exact samples
// around the cell [t_j, t_j+1]: outer secants cross above the true maximum
// and exactly at a kink apex, so interpolation overshoot gets clipped.
double secant_cap(const std::vector<double>& t, const std::vector<double>& y, int j) {
    double cap = std::max(y[j], y[j + 1]);
    if (j < 1 || j + 2 >= static_cast<int>(t.size())) return cap;
    double sA = (y[j] - y[j - 1]) / (t[j] - t[j - 1]);
    double sB = (y[j + 2] - y[j + 1]) / (t[j + 2] - t[j + 1]);
    if (!(sA > sB)) return cap;
    double ts = (y[j + 1] - y[j] + sA * t[j] - sB * t[j + 1]) / (sA - sB);
    if (ts <= t[j] || ts >= t[j + 1]) return cap;
    return std::max(cap, y[j] + sA * (ts - t[j]));
}

} // namespace

axi_fn ellipsoid_support(grid_ptr g, const rot_ellipsoid& E) {
    double b = eq_axis(E, g->n), c = polar_axis(E, g->n);
    axi_fn h(g);
    h.values = (b * b * g->sin_t.array().square() + c * c * g->cos_t.array().square()).sqrt().matrix();
    return h;
}

axi_fn ellipsoid_radial(grid_ptr g, const rot_ellipsoid& E) {
    double b = eq_axis(E, g->n), c = polar_axis(E, g->n);
    axi_fn rho(g);
    rho.values = (g->sin_t.array().square() / (b * b) + g->cos_t.array().square() / (c * c))
                     .rsqrt()
                     .matrix();
    return rho;
}

axi_fn ellipsoid_curvature(grid_ptr g, const rot_ellipsoid& E) {
    // det A = r^n for the volume-normalized axes; factor (det A)^2 |Ax|^-(n+1)
    axi_fn h = ellipsoid_support(g, E);
    axi_fn k(g);
    double det2 = std::pow(E.r, 2 * g->n);
    k.values = (det2 * h.values.array().pow(-(g->n + 1.0))).matrix();
    return k;
}

axi_fn monge_ampere(const axi_fn& h, bool* convex) {
    const auto& g = *h.grid;
    VectorXd h1 = g.D1 * h.values, h2 = g.D2 * h.values;
    Eigen::ArrayXd radial = h2.array() + h.values.array();
    Eigen::ArrayXd azim = h1.array() * g.cot_t.array() + h.values.array();
    if (convex) *convex = (radial.minCoeff() >= 0.0) && (azim.minCoeff() >= 0.0);
    axi_fn out(h.grid);
    out.values = (radial * azim.pow(g.n - 2)).matrix();
    return out;
}

grad_map gradient_map(const axi_fn& h) {
    const auto& g = *h.grid;
    VectorXd h1 = g.D1 * h.values;
    grad_map m{axi_fn(h.grid), axi_fn(h.grid)};
    m.xi_eq.values = (h1.array() * g.cos_t.array() + h.values.array() * g.sin_t.array()).matrix();
    m.xi_axis.values = (h.values.array() * g.cos_t.array() - h1.array() * g.sin_t.array()).matrix();
    return m;
}

axi_fn grad_norm(const axi_fn& h) {
    VectorXd h1 = h.grid->D1 * h.values;
    axi_fn out(h.grid);
    out.values = (h1.array().square() + h.values.array().square()).sqrt().matrix();
    return out;
}

double dual_volume(const axi_fn& rho, double q) {
    if (q == 0.0) throw std::invalid_argument("dual_volume: q = 0 not supported");
    axi_fn f(rho.grid);
    f.values = rho.values.array().pow(q).matrix();
    return integrate(f) / rho.grid->n;
}

double surface_area(const axi_fn& h) { return integrate(monge_ampere(h)); }

double body_volume(const axi_fn& h) {
    axi_fn f = monge_ampere(h);
    f.values.array() *= h.values.array();
    return integrate(f) / h.grid->n;
}

axi_fn alexandrov_radial(const axi_fn& gfn) {
    const auto& g = *gfn.grid;
    fold_table ft = build_fold_table(gfn);
    int M = static_cast<int>(ft.t.size());
    const double win = 0.5 * M_PI - 1e-9;
    axi_fn rho(gfn.grid);
    std::vector<double> lt, ly;
    for (int i = 0; i < g.N; ++i) {
        double u = g.theta[i];
        double best = std::numeric_limits<double>::infinity();
        int bj = -1;
        for (int j = 0; j < M; ++j) {
            double d = u - ft.t[j];
            if (std::abs(d) >= win) continue;
            double val = ft.v[j] / std::cos(d);
            if (val < best) {
                best = val;
                bj = j;
            }
        }
        double lo = std::max(u - win, bj > 0 ? ft.t[bj - 1] : ft.t[0]);
        double hi = std::min(u + win, bj + 1 < M ? ft.t[bj + 1] : ft.t[M - 1]);
        auto phi = [&](double t) { return eval_folded(g, gfn.values, t) / std::cos(u - t); };
        double ts = golden_min(phi, lo, hi, 48);
        double refined = std::min(best, phi(ts));
        // clip interpolation undershoot against the convex envelope of the
        // exact samples bracketing the minimum
        lt.clear();
        ly.clear();
        for (int j = std::max(0, bj - 2); j <= std::min(M - 1, bj + 2); ++j) {
            if (std::abs(u - ft.t[j]) >= win) continue;
            lt.push_back(ft.t[j]);
            ly.push_back(-ft.v[j] / std::cos(u - ft.t[j]));
        }
        double floor_val = -std::numeric_limits<double>::infinity();
        for (int c = 0; c + 1 < static_cast<int>(lt.size()); ++c)
            if (lt[c] <= ts && ts <= lt[c + 1]) floor_val = secant_cap(lt, ly, c);
        rho.values[i] = std::max(refined, -floor_val);
    }
    return rho;
}

axi_fn support_from_radial(const axi_fn& rfn) {
    const auto& g = *rfn.grid;
    fold_table ft = build_fold_table(rfn);
    int M = static_cast<int>(ft.t.size());
    const double win = 0.5 * M_PI - 1e-9;
    axi_fn h(rfn.grid);
    std::vector<double> lt, ly;
    for (int i = 0; i < g.N; ++i) {
        double u = g.theta[i];
        double best = -std::numeric_limits<double>::infinity();
        int bj = -1;
        for (int j = 0; j < M; ++j) {
            double d = u - ft.t[j];
            if (std::abs(d) >= win) continue;
            double val = ft.v[j] * std::cos(d);
            if (val > best) {
                best = val;
                bj = j;
            }
        }
        double lo = std::max(u - win, bj > 0 ? ft.t[bj - 1] : ft.t[0]);
        double hi = std::min(u + win, bj + 1 < M ? ft.t[bj + 1] : ft.t[M - 1]);
        auto phi = [&](double t) { return -eval_folded(g, rfn.values, t) * std::cos(u - t); };
        double ts = golden_min(phi, lo, hi, 48);
        double refined = std::max(best, -phi(ts));
        // clip interpolation overshoot against the concave envelope of the
        // exact samples bracketing the maximum
        lt.clear();
        ly.clear();
        for (int j = std::max(0, bj - 2); j <= std::min(M - 1, bj + 2); ++j) {
            if (std::abs(u - ft.t[j]) >= win) continue;
            lt.push_back(ft.t[j]);
            ly.push_back(ft.v[j] * std::cos(u - ft.t[j]));
        }
        double cap_val = std::numeric_limits<double>::infinity();
        for (int c = 0; c + 1 < static_cast<int>(lt.size()); ++c)
            if (lt[c] <= ts && ts <= lt[c + 1]) cap_val = secant_cap(lt, ly, c);
        h.values[i] = std::min(refined, cap_val);
    }
    return h;
}

rot_ellipsoid min_ellipsoid(const axi_fn& h) {
    const auto& g = *h.grid;
    axi_fn rho = alexandrov_radial(h);
    auto r_of = [&](double la) {
        double a = std::exp(la);
        double an = std::pow(a, -1.0 / g.n);
        double r = 0.0;
        for (int i = 0; i < g.N; ++i) {
            double s = g.sin_t[i], c = g.cos_t[i];
            r = std::max(r, rho.values[i] * an * std::sqrt(s * s + a * a * c * c));
        }
        return r;
    };
    double la = golden_min([&](double x) { return std::log(r_of(x)); }, -9.2, 9.2, 96);
    rot_ellipsoid E{r_of(la), std::exp(la)};

    axi_fn hE = ellipsoid_support(h.grid, E);
    double scale = h.values.maxCoeff();
    for (int i = 0; i < g.N; ++i)
        if (hE.values[i] / g.n > h.values[i] + 1e-9 * scale)
            throw std::runtime_error("min_ellipsoid: inner containment violated");
    return E;
}

} // namespace dlpm
