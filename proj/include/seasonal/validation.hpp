#pragma once
// Acceptance checks wiring the analytic machinery to its independent
// oracles (trajectory integration, grid DP, randomized searches). Each
// check prints one line through the callers; tolerances are fixed here.

#include <string>
#include <vector>

namespace seasonal::validation {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// all acceptance criteria, in order
std::vector<CheckResult> run_acceptance();

// "quick": the seconds-scale subset; "full": everything including the DP
// comparisons. Throws std::invalid_argument on unknown suite names.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace seasonal::validation
