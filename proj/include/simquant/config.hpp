#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace simquant {

struct RunConfig {
    std::string weight = "cs";  // cs | inversion
    double alpha = 3.0;
    std::string observable = "p";
    std::string out = ".";
    std::uint64_t seed = 1;
    std::string suite = "all";
    bool legacy_6_28 = false;

    // Field grid.
    int grid_n_r = 256, grid_n_theta = 64;
    double grid_r_min = 1e-4, grid_r_max = 60.0;

    // Phase-space sampling for portraits.
    int nq_r = 48, nq_t = 16, np_r = 24, np_t = 16;
    double q_min = 0.05, q_max = 100.0, p_max = 12.0;

    // Tolerance overrides: key is a check-name prefix.
    std::map<std::string, double> tolerances;

    // Override for the check `name`: the longest matching prefix wins.
    double tolerance(const std::string& name, double fallback) const;
};

// Flat key=value text; several pairs may share a line, '#' starts a comment.
// ParseError names the line and field; ValidationError lists violated bounds.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
// Applies one key=value pair (used for files and command-line overrides).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const RunConfig& cfg);

}  // namespace simquant
