// Acceptance suite: runs every criterion of the oracle-equivalence suite and
// prints one PASS/FAIL line per criterion. Exit status is nonzero if any
// criterion fails.

#include <cstdio>

#include "skw/selfcheck.hpp"

int main() {
    auto results = skw::selfcheck::run_all();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        std::printf("%s  criterion %2d  %-28s  %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
