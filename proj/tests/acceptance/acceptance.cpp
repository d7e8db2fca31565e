// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one check per criterion, each printing a PASS/FAIL line.
// Run everything or a single criterion with --criterion N.

#include <cstdio>
#include <cstring>
#include <string>

#include "sixdmhs/harness.hpp"

int run_criterion(int n);

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    int failures = 0;
    for (int n = 1; n <= 13; ++n) {
        if (only != 0 && n != only) continue;
        failures += run_criterion(n);
    }
    return failures == 0 ? 0 : 1;
}

int run_criterion(int n) {
    std::printf("[SKIP] criterion %d: not yet implemented\n", n);
    return 1;
}
