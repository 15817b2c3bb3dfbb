// Acceptance runner: one line per criterion, nonzero exit on any failure.

#include <cstdio>

#include <bkh/verify.hpp>

int main() {
    auto run = bkh::run_verify_all();
    for (const auto& r : run.results)
        std::printf("criterion %2d %s  %-32s %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
    std::printf("%s\n", run.all_pass ? "acceptance: all criteria passed"
                                     : "acceptance: FAILURES PRESENT");
    return run.all_pass ? 0 : 1;
}
