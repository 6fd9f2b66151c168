#pragma once

#include <string>
#include <vector>

namespace cnmc {

struct CheckResult {
    std::string suite;
    std::string name;
    double value = 0.0;  // measured quantity
    double bound = 0.0;  // pass iff value < bound
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    /// One "PASS|FAIL suite/name value=.. bound=.." line per check.
    std::string text() const;
    std::string json() const;
};

/// quad, kernels, nmc, linearized, branch.
const std::vector<std::string>& verify_suites();

/// Runs one suite, or all of them for an empty name. Throws DomainError on
/// an unknown suite. The report does not depend on `threads`.
VerifyReport run_verify(const std::string& suite, int threads = 1);

}  // namespace cnmc
