#pragma once

// Release checks: the quantitative claims the library is shipped against,
// each with its tolerance pinned in code. The CLI selftest subcommand and
// the acceptance test binary both drive this table.

#include <string>
#include <vector>

namespace syl {

struct CheckResult {
    std::string id;
    std::string detail; // measured numbers backing the verdict
    bool pass = false;
    double ms = 0.0;
};

// Runs all release checks in a fixed order. quick trims the densest grids
// (same claims, fewer instances). inject_drift is a negative control: it
// corrupts the integration tolerances of the conservation check, which must
// then fail — a selftest that cannot go red proves nothing.
std::vector<CheckResult> run_acceptance(bool quick, bool inject_drift = false);

} // namespace syl
