#include "dlpm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dlpm {

namespace {

const char* const kCommands[] = {"minkowski", "solve",  "construct",
                                 "bounds",    "sweep",  "verify"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& origin, int line,
                          const std::string& what) {
    throw std::invalid_argument(origin + " line " + std::to_string(line) +
                                ": " + what);
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    fail_at(origin, line, "invalid number '" + v + "' for key '" + key + "'");
}

long parse_long(const std::string& origin, int line, const std::string& key,
                const std::string& v) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    fail_at(origin, line, "invalid integer '" + v + "' for key '" + key + "'");
}

std::vector<double> parse_list(const std::string& origin, int line,
                               const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(origin, line, key, trim(item)));
    if (out.empty()) fail_at(origin, line, "empty list for key '" + key + "'");
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += cfg_double(v[i]);
    }
    return s;
}

} // namespace

bool known_command(const std::string& cmd) {
    return std::find(std::begin(kCommands), std::end(kCommands), cmd) !=
           std::end(kCommands);
}

run_config parse_config_text(const std::string& text,
                             const std::string& origin) {
    run_config rc;
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) fail_at(origin, line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key == "command") {
            if (!known_command(val))
                fail_at(origin, line, "unknown command '" + val + "'");
            rc.command = val;
        } else if (key == "n") {
            rc.n = static_cast<int>(parse_long(origin, line, key, val));
        } else if (key == "p") {
            rc.p = parse_double(origin, line, key, val);
        } else if (key == "q") {
            rc.q = parse_double(origin, line, key, val);
        } else if (key == "alpha") {
            rc.alpha = parse_double(origin, line, key, val);
        } else if (key == "beta") {
            rc.beta = parse_double(origin, line, key, val);
        } else if (key == "delta") {
            rc.delta = parse_double(origin, line, key, val);
        } else if (key == "eps") {
            rc.eps = parse_list(origin, line, key, val);
        } else if (key == "a_sweep") {
            rc.a_sweep = parse_list(origin, line, key, val);
        } else if (key == "N") {
            rc.N = static_cast<int>(parse_long(origin, line, key, val));
        } else if (key == "grading") {
            rc.grading = parse_double(origin, line, key, val);
        } else if (key == "tol") {
            rc.tol = parse_double(origin, line, key, val);
        } else if (key == "out") {
            rc.out = val;
        } else if (key == "seed") {
            rc.seed = parse_long(origin, line, key, val);
        } else {
            fail_at(origin, line, "unknown key '" + key + "'");
        }
    }
    return rc;
}

run_config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string to_config_text(const run_config& rc) {
    std::string s;
    if (!rc.command.empty()) s += "command = " + rc.command + "\n";
    s += "n = " + std::to_string(rc.n) + "\n";
    s += "p = " + cfg_double(rc.p) + "\n";
    s += "q = " + cfg_double(rc.q) + "\n";
    if (rc.alpha) s += "alpha = " + cfg_double(*rc.alpha) + "\n";
    if (rc.beta) s += "beta = " + cfg_double(*rc.beta) + "\n";
    if (rc.delta) s += "delta = " + cfg_double(*rc.delta) + "\n";
    if (!rc.eps.empty()) s += "eps = " + join_list(rc.eps) + "\n";
    if (!rc.a_sweep.empty()) s += "a_sweep = " + join_list(rc.a_sweep) + "\n";
    s += "N = " + std::to_string(rc.N) + "\n";
    s += "grading = " + cfg_double(rc.grading) + "\n";
    s += "tol = " + cfg_double(rc.tol) + "\n";
    s += "out = " + rc.out + "\n";
    s += "seed = " + std::to_string(rc.seed) + "\n";
    return s;
}

std::string manifest_text(const run_config& rc) {
    return "# dlpm 1.0.0 run manifest: inputs, grid, tolerances\n"
           "# this file is itself a valid config reproducing the run\n" +
           to_config_text(rc);
}

problem_params resolve_params(const run_config& rc, bool squash) {
    problem_params pp;
    pp.n = rc.n;
    pp.p = rc.p;
    pp.q = rc.q;
    if (squash && !(rc.alpha && rc.beta && rc.delta))
        pp = choose_parameters(rc.n, rc.p, rc.q);
    if (rc.alpha) pp.alpha = *rc.alpha;
    if (rc.beta) pp.beta = *rc.beta;
    if (rc.delta) pp.delta = *rc.delta;
    check_admissible(pp);
    if (squash) {
        if (pp.q < 1.0 && !(pp.delta > 1.0 - pp.q && pp.delta < -pp.p))
            throw std::invalid_argument("delta inside (1 - q, -p) violated");
        if (pp.q == 1.0 && !(pp.delta > 0.0 && pp.delta < -pp.p))
            throw std::invalid_argument("delta inside (0, -p) violated");
        if (pp.q > 1.0 && !(pp.delta > -pp.p * (pp.q - 1.0) / pp.q &&
                            pp.delta < -pp.p))
            throw std::invalid_argument(
                "delta inside (-p (q - 1) / q, -p) violated");
    }
    return pp;
}

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cfg_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string construction_csv(const std::vector<construction_record>& recs) {
    std::string s =
        "eps,h_min,h_max,dv_constructed,dv_variational,f_l1,"
        "residual_constructed,residual_variational,s0_pass,gap\n";
    for (const auto& r : recs) {
        s += csv_double(r.params.epsilon) + "," + csv_double(r.h_min) + "," +
             csv_double(r.h_max) + "," + csv_double(r.dv_constructed) + "," +
             csv_double(r.dv_variational) + "," + csv_double(r.f_l1) + "," +
             csv_double(r.residual_constructed) + "," +
             csv_double(r.residual_variational) + "," +
             (r.s0_pass ? "1" : "0") + "," + csv_double(r.solution_gap) + "\n";
    }
    return s;
}

std::string sweep_csv(const std::vector<construction_record>& recs) {
    std::string s =
        "eps,h_min,h_max,f_l1,dv_constructed,residual_constructed\n";
    for (const auto& r : recs) {
        s += csv_double(r.params.epsilon) + "," + csv_double(r.h_min) + "," +
             csv_double(r.h_max) + "," + csv_double(r.f_l1) + "," +
             csv_double(r.dv_constructed) + "," +
             csv_double(r.residual_constructed) + "\n";
    }
    return s;
}

std::string verdict_json(const pipeline_verdict& v) {
    nlohmann::ordered_json j;
    j["pass"] = v.pass;
    j["smallest_eps"] = v.smallest_eps;
    j["ratio"] = v.ratio;
    j["gap"] = v.gap;
    return j.dump(2) + "\n";
}

std::string fa_sweep_csv(const slope_fit& fit) {
    std::string s = "a,r,F,predicted_exp,fitted_exp,log_flag\n";
    const char* log_flag = fit.predicted_log_power != 0.0 ? "1" : "0";
    for (const auto& pt : fit.points) {
        s += csv_double(pt.a) + "," + csv_double(pt.r) + "," +
             csv_double(pt.F) + "," + csv_double(fit.predicted_slope) + "," +
             csv_double(fit.fitted_slope) + "," + log_flag + "\n";
    }
    return s;
}

std::string profile_csv(const std::vector<std::string>& names,
                        const std::vector<const axi_fn*>& cols) {
    if (names.size() != cols.size() || cols.empty())
        throw std::invalid_argument("profile_csv: names and columns mismatch");
    auto g = cols[0]->grid;
    for (const auto* c : cols)
        if (c->grid != g) throw std::invalid_argument("profile_csv: mixed grids");
    std::string s = "theta";
    for (const auto& nm : names) s += "," + nm;
    s += "\n";
    for (int i = 0; i < g->N; ++i) {
        s += csv_double(g->theta[i]);
        for (const auto* c : cols) s += "," + csv_double(c->values[i]);
        s += "\n";
    }
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path fp(path);
    if (fp.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(fp.parent_path(), ec);
    }
    std::ofstream out(fp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

} // namespace dlpm
