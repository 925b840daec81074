#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "structembed/bounds.hpp"

namespace structembed::verify {

struct CriterionResult {
    std::string name;
    bool pass = false;
    bool perf = false;  // performance criteria can be softened to warnings
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::vector<std::string> only;  // criterion names to run; empty = all
    bool perf_soft = false;         // report perf failures without failing the run
};

/// All criterion names, in execution order.
std::vector<std::string> criterion_names();

/// Runs the self-verification suite, streaming one [PASS]/[FAIL] line per
/// criterion to `out` as it completes.  Unknown names in opts.only throw
/// std::invalid_argument.
std::vector<CriterionResult> run(const VerifyOptions& opts, std::ostream& out);

/// False when any criterion failed; performance failures are forgiven when
/// perf_soft is set.
bool all_passed(const std::vector<CriterionResult>& results, bool perf_soft);

/// Independent reference for the closed-form failure bound: direct long
/// double products and sums, no log-space rearrangement.  Returns the
/// natural log of the bound.
long double theorem1_reference_log(const Theorem1Params& p);

}  // namespace structembed::verify
