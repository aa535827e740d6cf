#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qlat {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Runs the acceptance battery against the shipped fixtures. `only` limits
// to a subset of criterion ids; empty means all. Each criterion prints one
// PASS/FAIL line to `log` as it completes.
std::vector<CriterionResult> run_acceptance(const std::string& fixtures_dir,
                                            std::ostream& log,
                                            const std::vector<int>& only = {},
                                            int threads = 0);

// Machine-readable report (CSV: id,name,pass,seconds,detail).
void write_acceptance_report(const std::vector<CriterionResult>& results,
                             std::ostream& os);

} // namespace qlat
