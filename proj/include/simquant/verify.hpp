#pragma once

#include <string>
#include <vector>

#include "simquant/config.hpp"

namespace simquant {

struct CheckResult {
    std::string suite;
    std::string name;
    std::string ref;  // the identity being checked, in words
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::vector<const CheckResult*> failures() const;
    // Deterministic JSON: {"seed": .., "suites": [..], "checks": [{name, ref, value, target, tolerance, pass}], "pass": ..}.
    std::string to_json(const RunConfig& cfg) const;
};

// group, basis, weights, inversion, corrected, acs, wigner, resolution, twosheet, portraits
const std::vector<std::string>& suite_names();
// Suites selected by cfg.suite: "all" or a comma-separated list; ParseError for unknown names.
std::vector<std::string> selected_suites(const RunConfig& cfg);
Report run_suite(const std::string& suite, const RunConfig& cfg);
Report run_verify(const RunConfig& cfg);

}  // namespace simquant
