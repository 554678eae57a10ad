#pragma once
#include <optional>
#include <string>
#include <vector>

#include "dlpm/bounds.hpp"
#include "dlpm/construction.hpp"

namespace dlpm {

// One invocation of the tool, complete enough to reproduce it bit for bit.
struct run_config {
    std::string command;    // minkowski, solve, construct, bounds, sweep, verify
    int n = 2;
    double p = -1.0;
    double q = 0.5;
    std::optional<double> alpha, beta, delta;  // absent: filled per command
    std::vector<double> eps;      // eccentricity ladder
    std::vector<double> a_sweep;  // axis-ratio ladder for the data-integral sweep
    int N = 512;
    double grading = 2.0;
    double tol = 1e-5;  // local Newton target where a command polishes
    std::string out = ".";
    long seed = 0;  // recorded for reproducibility
};

bool known_command(const std::string& cmd);

// Flat "key = value" text. Blank lines and '#' comments are skipped; a
// malformed line or unknown key is rejected with "<origin> line <k>: ...".
run_config parse_config_text(const std::string& text,
                             const std::string& origin = "config");
run_config parse_config_file(const std::string& path);

// canonical config text; parse_config_text inverts it exactly
std::string to_config_text(const run_config& rc);

// commented header plus the canonical config, so the manifest of a run is
// itself a config reproducing that run
std::string manifest_text(const run_config& rc);

// Problem indices with absent alpha/beta/delta filled in and the standing
// inequalities checked. Squashing commands pick missing values from
// choose_parameters and additionally pin delta inside its q-branch window;
// the others default missing exponents to zero.
problem_params resolve_params(const run_config& rc, bool squash);

std::string csv_double(double v);  // 17 significant digits
std::string cfg_double(double v);  // shortest text that parses back exactly

std::string construction_csv(const std::vector<construction_record>& recs);
std::string sweep_csv(const std::vector<construction_record>& recs);
std::string verdict_json(const pipeline_verdict& v);
std::string fa_sweep_csv(const slope_fit& fit);

// generic node-profile table; a theta column followed by the named fields,
// which must share one grid
std::string profile_csv(const std::vector<std::string>& names,
                        const std::vector<const axi_fn*>& cols);

void write_text_file(const std::string& path, const std::string& content);

} // namespace dlpm
