#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "dlpm/io.hpp"
#include "dlpm/minkowski.hpp"
#include "dlpm/variational.hpp"

using namespace dlpm;

namespace {

std::string out_path(const run_config& rc, const char* name) {
    return (std::filesystem::path(rc.out) / name).string();
}

// data profile sin^alpha(theta) cos^beta(theta) for the plain solvers
axi_fn angular_data(const problem_params& pp, grid_ptr g) {
    axi_fn f(g);
    for (int i = 0; i < g->N; ++i)
        f.values[i] = std::pow(g->sin_t[i], pp.alpha) *
                      std::pow(g->cos_t[i], pp.beta);
    return f;
}

int run_minkowski(const run_config& rc, const problem_params& pp) {
    auto g = make_grid(rc.n, rc.N, rc.grading);
    auto data = rhs_classical(pp, g);
    auto h = solve_minkowski(data);
    auto ma = monge_ampere(h);
    double defect = std::abs(integrate(data) - integrate(ma));
    std::printf("minkowski: N=%d h in [%.6g, %.6g], mass defect %.3g\n", rc.N,
                h.values.minCoeff(), h.values.maxCoeff(), defect);
    write_text_file(out_path(rc, "minkowski.csv"),
                    profile_csv({"g", "h", "ma"}, {&data, &h, &ma}));
    write_text_file(out_path(rc, "MANIFEST"), manifest_text(rc));
    std::printf("wrote %s\n", out_path(rc, "minkowski.csv").c_str());
    return 0;
}

int run_solve(const run_config& rc, const problem_params& pp) {
    auto g = make_grid(rc.n, rc.N, rc.grading);
    auto f = angular_data(pp, g);
    auto st = maximize(f, pp.p, pp.q, axi_fn(g, 1.0), {});
    auto sol = extract_solution(st, f, pp.p, pp.q);
    auto H = newton_local_solve(f, pp.p, pp.q, sol.H, rc.tol);
    double res = residual(H, f, pp.p, pp.q);
    double dv = dual_volume(alexandrov_radial(H), pp.q);
    std::printf(
        "solve: %d ascent iterations, J=%.9g, c=%.9g, residual=%.3g, "
        "dual volume=%.9g\n",
        st.iteration, st.J_value, sol.c, res, dv);
    write_text_file(out_path(rc, "solve.csv"),
                    profile_csv({"f", "H"}, {&f, &H}));
    write_text_file(out_path(rc, "MANIFEST"), manifest_text(rc));
    std::printf("wrote %s\n", out_path(rc, "solve.csv").c_str());
    return 0;
}

int run_construct(const run_config& rc, const problem_params& pp,
                  bool gate_exit) {
    pipeline_options po;
    po.n = rc.n;
    po.N = rc.N;
    po.grading = rc.grading;
    po.newton_tol = rc.tol;
    auto out = run_pipeline(pp.p, pp.q, rc.eps, po);
    for (const auto& r : out.records)
        std::printf("eps %-7g rc=%.3g rv=%.3g gap=%.4g ratio=%.4g s0=%d\n",
                    r.params.epsilon, r.residual_constructed,
                    r.residual_variational, r.solution_gap,
                    r.dv_variational / r.dv_constructed, r.s0_pass ? 1 : 0);
    std::printf("verdict %s (smallest eps %g, ratio %.4g, gap %.4g)\n",
                out.verdict.pass ? "PASS" : "FAIL", out.verdict.smallest_eps,
                out.verdict.ratio, out.verdict.gap);
    write_text_file(out_path(rc, "construction.csv"),
                    construction_csv(out.records));
    write_text_file(out_path(rc, "verdict.json"), verdict_json(out.verdict));
    write_text_file(out_path(rc, "MANIFEST"), manifest_text(rc));
    std::printf("wrote %s\n", out_path(rc, "construction.csv").c_str());
    return gate_exit && !out.verdict.pass ? 3 : 0;
}

int run_sweep(const run_config& rc, const problem_params& pp) {
    auto g = make_grid(rc.n, rc.N, rc.grading);
    std::vector<construction_record> recs;
    for (double e : rc.eps) {
        construction_record r;
        r.params = pp;
        r.params.epsilon = e;
        auto h = solve_minkowski(rhs_classical(r.params, g));
        auto H = transform_support(h, e, pp.p, pp.q, pp.delta);
        auto f = f_epsilon(h, r.params);
        r.h_min = h.values.minCoeff();
        r.h_max = h.values.maxCoeff();
        r.f_l1 = integrate(f);
        r.dv_constructed = dual_volume(alexandrov_radial(H), pp.q);
        r.residual_constructed = residual(H, f, pp.p, pp.q);
        std::printf("eps %-7g h in [%.6g, %.6g], dv=%.6g, residual=%.3g\n", e,
                    r.h_min, r.h_max, r.dv_constructed,
                    r.residual_constructed);
        recs.push_back(std::move(r));
    }
    write_text_file(out_path(rc, "sweep.csv"), sweep_csv(recs));
    write_text_file(out_path(rc, "MANIFEST"), manifest_text(rc));
    std::printf("wrote %s\n", out_path(rc, "sweep.csv").c_str());
    return 0;
}

int run_bounds(const run_config& rc, const problem_params& pp) {
    band b = classify_band(rc.a_sweep.front());
    auto fit = verify_decay(pp, b, rc.a_sweep);
    std::printf("band %s: predicted %.6g fitted %.6g (rel err %.3g)%s %s\n",
                b == band::A1 ? "A1" : "A3", fit.predicted_slope,
                fit.fitted_slope, fit.rel_error,
                fit.predicted_log_power != 0.0 ? ", log factor divided out"
                                               : "",
                fit.ok ? "ok" : "off");
    if (!fit.note.empty()) std::printf("note: %s\n", fit.note.c_str());
    write_text_file(out_path(rc, "fa_sweep.csv"), fa_sweep_csv(fit));
    write_text_file(out_path(rc, "MANIFEST"), manifest_text(rc));
    std::printf("wrote %s\n", out_path(rc, "fa_sweep.csv").c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dlpm: an axisymmetric laboratory for the dual Minkowski problem "
        "family.\nCommands: minkowski (curvature-data solve), solve "
        "(variational solve), construct\n(squashed-body sweep with both "
        "solutions certified), sweep (construction side\nonly), bounds "
        "(data-integral decay exponents), verify (construct, exit 3 on\n"
        "verdict FAIL)."};
    std::string command, config_path;
    run_config fl;
    std::vector<double> eps, a_sweep;

    app.add_option("command", command,
                   "minkowski | solve | construct | bounds | sweep | verify");
    auto* on = app.add_option("--n", fl.n, "ambient dimension (>= 2)");
    auto* op = app.add_option("--p", fl.p, "support exponent (< 0)");
    auto* oq = app.add_option("--q", fl.q, "dual-volume exponent (> 0)");
    auto* oa = app.add_option("--alpha", fl.alpha, "data exponent on sin");
    auto* ob = app.add_option("--beta", fl.beta, "data exponent on cos");
    auto* od = app.add_option("--delta", fl.delta, "squash decay margin");
    auto* oe = app.add_option("--eps", eps, "eccentricity ladder")
                   ->delimiter(',');
    auto* oas = app.add_option("--a-sweep", a_sweep, "axis-ratio ladder")
                    ->delimiter(',');
    auto* oN = app.add_option("--N", fl.N, "meridian nodes (>= 32)");
    auto* og = app.add_option("--grading", fl.grading, "node clustering power");
    auto* ot = app.add_option("--tol", fl.tol, "local Newton target");
    auto* oo = app.add_option("--out", fl.out, "output directory");
    auto* os = app.add_option("--seed", fl.seed, "recorded in the manifest");
    app.add_option("--config", config_path, "flat key = value config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    run_config rc;
    problem_params pp;
    bool squash = false;
    try {
        if (!config_path.empty()) rc = parse_config_file(config_path);
        if (on->count()) rc.n = fl.n;
        if (op->count()) rc.p = fl.p;
        if (oq->count()) rc.q = fl.q;
        if (oa->count()) rc.alpha = fl.alpha;
        if (ob->count()) rc.beta = fl.beta;
        if (od->count()) rc.delta = fl.delta;
        if (oe->count()) rc.eps = eps;
        if (oas->count()) rc.a_sweep = a_sweep;
        if (oN->count()) rc.N = fl.N;
        if (og->count()) rc.grading = fl.grading;
        if (ot->count()) rc.tol = fl.tol;
        if (oo->count()) rc.out = fl.out;
        if (os->count()) rc.seed = fl.seed;
        if (!command.empty()) rc.command = command;
        if (rc.command.empty())
            throw std::invalid_argument(
                "command required: minkowski, solve, construct, bounds, "
                "sweep, or verify");
        if (!known_command(rc.command))
            throw std::invalid_argument("unknown command '" + rc.command + "'");
        if (rc.out.empty()) rc.out = ".";

        squash = rc.command == "construct" || rc.command == "verify" ||
                 rc.command == "sweep";
        pp = resolve_params(rc, squash);
        rc.alpha = pp.alpha;
        rc.beta = pp.beta;
        rc.delta = pp.delta;

        if (squash && rc.eps.empty()) rc.eps = {0.4, 0.2, 0.1, 0.05};
        if (rc.command == "construct" || rc.command == "verify") {
            for (double e : rc.eps) {
                problem_params w = pp;
                w.epsilon = e;
                check_admissible(w, true);
            }
        } else if (rc.command == "sweep") {
            for (double e : rc.eps)
                if (!(e > 0.0 && e <= 1.0))
                    throw std::invalid_argument(
                        "epsilon inside (0, 1] violated");
        } else if (!rc.eps.empty()) {
            pp.epsilon = rc.eps.front();
        }
        if (rc.command == "bounds") {
            if (!(pp.alpha > 1.0 - pp.n))
                throw std::invalid_argument("alpha > 1-n violated");
            if (!(pp.beta > -1.0))
                throw std::invalid_argument("beta > -1 violated");
            if (rc.a_sweep.empty()) rc.a_sweep = geometric_sweep(1e2, 1e3, 4);
            band b = classify_band(rc.a_sweep.front());
            bool outer_band = b != band::A2;
            for (double a : rc.a_sweep)
                outer_band = outer_band && classify_band(a) == b;
            if (!outer_band)
                throw std::invalid_argument(
                    "a_sweep inside one outer band violated");
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (rc.command == "minkowski") return run_minkowski(rc, pp);
        if (rc.command == "solve") return run_solve(rc, pp);
        if (rc.command == "construct") return run_construct(rc, pp, false);
        if (rc.command == "verify") return run_construct(rc, pp, true);
        if (rc.command == "sweep") return run_sweep(rc, pp);
        return run_bounds(rc, pp);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
