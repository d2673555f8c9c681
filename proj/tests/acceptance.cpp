// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <cstdio>

#include "aztec/verify.hpp"

int main() {
    const std::uint64_t seed = 20240611;
    auto checks = aztec::run_acceptance(seed);
    int failed = 0;
    for (const auto& c : checks) {
        std::printf("%s criterion %2d: %s -- %s [%.2fs]\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.detail.c_str(),
                    c.seconds);
        failed += !c.pass;
    }
    std::printf("%d of %zu criteria passed\n", int(checks.size()) - failed, checks.size());
    return failed == 0 ? 0 : 1;
}
