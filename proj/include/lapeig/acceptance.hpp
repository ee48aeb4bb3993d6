#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace lapeig {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// Criteria to run; empty runs all nine.
    std::set<int> only;
    /// Called as each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// `criterion <id> PASS|FAIL <title>: <detail> (<seconds> s)`
std::string format_result(const CriterionResult& r);

} // namespace lapeig
