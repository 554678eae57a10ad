#include "dlpm/grid.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dlpm {

namespace {

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_k.
void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w) {
    x.assign(k, 0.0);
    w.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (k + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < k; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = k * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[k - 1 - i] = z;
        w[k - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

// Fornberg finite-difference weights: derivatives up to order m at z over
// the given nodes. c is (nodes x (m+1)).
void fornberg(double z, const std::vector<double>& xn, int m,
              std::vector<std::vector<double>>& c) {
    int nd = static_cast<int>(xn.size()) - 1;
    c.assign(nd + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = xn[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = xn[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = xn[i] - xn[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s)
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
}

constexpr int ghost = 8;
constexpr double map_floor = 0.08;

double fold_sign(parity par, int side) {
    if (side == -1 && par == parity::odd_even) return -1.0;
    if (side == 1 && par == parity::even_odd) return -1.0;
    return 1.0;
}

} // namespace

grid_ptr make_grid(int n, int N, double grading) {
    if (n < 2) throw std::invalid_argument("make_grid: n >= 2 required");
    if (N < 32) throw std::invalid_argument("make_grid: N >= 32 required");
    if (grading < 1.0) throw std::invalid_argument("make_grid: grading >= 1 required");

    auto g = std::make_shared<meridian_grid>();
    g->n = n;
    g->N = N;
    g->grading = grading;

    const double bgg = std::pow(4.0, grading - 1.0) * boost::math::beta(grading, grading);
    const double z = map_floor + bgg;
    auto map_s = [&](double u) {
        return (map_floor * u + bgg * boost::math::ibeta(grading, grading, u)) / z;
    };
    auto map_ds = [&](double u) {
        return (map_floor + std::pow(4.0 * u * (1.0 - u), grading - 1.0)) / z;
    };

    // composite panels of equal width, sizes balanced so every rule stays
    // high order even when 8 does not divide N
    int panels = (N + 7) / 8;
    int base = N / panels, extra = N % panels;
    std::vector<std::vector<double>> gx(2), gw(2);
    gauss_legendre(base, gx[0], gw[0]);
    if (extra) gauss_legendre(base + 1, gx[1], gw[1]);

    g->theta.resize(N);
    g->w.resize(N);
    g->w_bare.resize(N);
    const double om = omega_axis(n);
    int idx = 0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double u0 = double(pnl) / panels, u1 = double(pnl + 1) / panels;
        double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
        int which = pnl < extra ? 1 : 0;
        for (size_t j = 0; j < gx[which].size(); ++j, ++idx) {
            double u = mid + half * gx[which][j];
            double th = 0.5 * M_PI * map_s(u);
            double dth = 0.5 * M_PI * map_ds(u) * half * gw[which][j];
            g->theta[idx] = th;
            g->w_bare[idx] = dth;
            g->w[idx] = dth * 2.0 * om * std::pow(std::sin(th), n - 2);
        }
    }

    for (int i = 1; i < N; ++i)
        if (!(g->theta[i] > g->theta[i - 1]))
            throw std::invalid_argument("make_grid: grading produced non-increasing nodes");

    g->sin_t = g->theta.array().sin().matrix();
    g->cos_t = g->theta.array().cos().matrix();
    g->cot_t = (g->cos_t.array() / g->sin_t.array()).matrix();

    g->ext_t.resize(N + 2 * ghost);
    g->ext_src.resize(N + 2 * ghost);
    g->ext_side.resize(N + 2 * ghost);
    for (int k = 0; k < ghost; ++k) {
        g->ext_t[k] = -g->theta[ghost - 1 - k];
        g->ext_src[k] = ghost - 1 - k;
        g->ext_side[k] = -1;
        g->ext_t[ghost + N + k] = M_PI - g->theta[N - 1 - k];
        g->ext_src[ghost + N + k] = N - 1 - k;
        g->ext_side[ghost + N + k] = 1;
    }
    for (int i = 0; i < N; ++i) {
        g->ext_t[ghost + i] = g->theta[i];
        g->ext_src[ghost + i] = i;
        g->ext_side[ghost + i] = 0;
    }

    // 9-point Fornberg stencils on the extended chart (even fields only)
    std::vector<Eigen::Triplet<double>> t1, t2;
    t1.reserve(9 * N);
    t2.reserve(9 * N);
    for (int i = 0; i < N; ++i) {
        int c = ghost + i;
        std::vector<double> xn(g->ext_t.begin() + c - 4, g->ext_t.begin() + c + 5);
        std::vector<std::vector<double>> cw;
        fornberg(g->theta[i], xn, 2, cw);
        for (int j = 0; j < 9; ++j) {
            int slot = c - 4 + j;
            t1.emplace_back(i, g->ext_src[slot], cw[j][1]);
            t2.emplace_back(i, g->ext_src[slot], cw[j][2]);
        }
    }
    g->D1.resize(N, N);
    g->D2.resize(N, N);
    g->D1.setFromTriplets(t1.begin(), t1.end());
    g->D2.setFromTriplets(t2.begin(), t2.end());
    return g;
}

double integrate(const axi_fn& f) {
    if (!f.grid || f.size() != f.grid->N)
        throw std::invalid_argument("integrate: field/grid size mismatch");
    for (int i = 0; i < f.size(); ++i)
        if (!std::isfinite(f.values[i])) {
            std::ostringstream os;
            os << "integrate: non-finite integrand at node " << i
               << " (theta=" << f.grid->theta[i] << ")";
            throw std::runtime_error(os.str());
        }
    return f.grid->w.dot(f.values);
}

VectorXd d1(const meridian_grid& g, const VectorXd& v) { return g.D1 * v; }
VectorXd d2(const meridian_grid& g, const VectorXd& v) { return g.D2 * v; }

double interp_at(const meridian_grid& g, const VectorXd& v, double t, parity par) {
    const auto& et = g.ext_t;
    if (t < et.front()) t = et.front();
    if (t > et.back()) t = et.back();
    auto it = std::lower_bound(et.begin(), et.end(), t);
    int c = static_cast<int>(it - et.begin());
    int lo = std::clamp(c - 4, 0, static_cast<int>(et.size()) - 8);
    // 8-point Lagrange with parity-signed folds
    double acc = 0.0;
    for (int j = lo; j < lo + 8; ++j) {
        double lj = 1.0;
        for (int k = lo; k < lo + 8; ++k) {
            if (k == j) continue;
            lj *= (t - et[k]) / (et[j] - et[k]);
        }
        acc += lj * fold_sign(par, g.ext_side[j]) * v[g.ext_src[j]];
    }
    return acc;
}

VectorXd interp_many(const meridian_grid& g, const VectorXd& v, const VectorXd& t, parity par) {
    VectorXd out(t.size());
    for (int i = 0; i < t.size(); ++i) out[i] = interp_at(g, v, t[i], par);
    return out;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

} // namespace dlpm
