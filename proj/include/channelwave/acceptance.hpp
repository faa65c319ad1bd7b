#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace channelwave {

struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=" or "=="
    double bound = 0.0;
    double tolerance = 0.0;  // used by "=="
    bool passed = false;
    bool known_failure = false;  // documented as unattainable; reported but does not gate the exit code
    bool timing = false;         // wall-clock value, excluded from deterministic reports
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const;
    // Failed, but every failing check is a documented known failure.
    bool only_known_failures() const;
};

struct AcceptanceOptions {
    double resolution = 1.0;  // scales grid point counts; 0.25 is "n halved twice"
    bool quick = false;       // smaller batteries
    std::uint64_t seed = 2024;
    std::vector<int> only;    // empty: all ten
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS [3] title (12.3 s)" style line; FAIL lines list the failing checks.
std::string summary_line(const CriterionResult& r);

}  // namespace channelwave
