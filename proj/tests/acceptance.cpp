// Acceptance gate: runs every verification criterion and prints one
// [PASS]/[FAIL] line per criterion.  Exits 0 only if all pass.
//
// Usage: acceptance [--perf-soft] [--only NAME]...

#include <cstring>
#include <iostream>
#include <string>

#include "structembed/verify.hpp"

int main(int argc, char** argv) {
    structembed::verify::VerifyOptions opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--perf-soft") == 0) {
            opts.perf_soft = true;
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            opts.only.push_back(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--perf-soft] [--only NAME]...\n";
            return 2;
        }
    }
    try {
        const auto results = structembed::verify::run(opts, std::cout);
        const bool ok = structembed::verify::all_passed(results, opts.perf_soft);
        std::cout << (ok ? "ACCEPTANCE: all criteria passed"
                         : "ACCEPTANCE: some criteria FAILED")
                  << "\n";
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance run aborted: " << e.what() << "\n";
        return 1;
    }
}
