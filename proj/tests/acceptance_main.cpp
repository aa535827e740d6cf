// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Also reachable as `qlat suite`.

#include <cstring>
#include <iostream>
#include <vector>

#include "qlat/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto results = qlat::run_acceptance(QLAT_FIXTURES, std::cout, only);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass;
    std::cout << (ok ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
    return ok ? 0 : 1;
}
