// Release gate: runs every check in the ship table and prints one verdict
// line per check. A red line here blocks a release; the measured numbers
// are in the detail column.

#include <cstdio>

#include "doctest.h"
#include "syl/selftest.hpp"

using namespace syl;

TEST_CASE("release checks") {
    const auto results = run_acceptance(/*quick=*/false);
    REQUIRE(results.size() == 10);
    for (const auto& r : results) {
        std::printf("[%s] %-24s (%8.1f ms) %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.ms, r.detail.c_str());
        std::fflush(stdout);
        CHECK_MESSAGE(r.pass, r.id, ": ", r.detail);
    }
}
