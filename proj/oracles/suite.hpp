#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlirl::oracle {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct NamedCheck {
    const char* name;
    CheckResult (*run)();
};

// The three checks below are also acceptance criteria, so their instance sets are fixed.

/// 20 random 5x3 MDPs, 4 features, gamma 0.9, seeds 0-19: FP-based log L gradient
/// against central differences with exact re-solving, rel. error <= 1e-3.
CheckResult gradient_oracle_check();

/// Same instances: converged FP and IA agree entry-wise within 1e-6 under the greedy policy.
CheckResult fp_ia_identity_check();

/// 5 random 4-state MDPs: FP against 1e5-rollout Monte-Carlo sums, within 1e-2 per entry.
CheckResult fp_monte_carlo_check();

/// Every reference check, in a fixed order.
const std::vector<NamedCheck>& all_checks();

/// Runs one check with timing; an exception counts as a failure with its message as detail.
CheckResult run_check(const NamedCheck& check);

/// Runs all checks, printing one line per check when `log` is non-null. Returns the failure count.
std::size_t run_suite(std::ostream* log);

} // namespace mlirl::oracle
