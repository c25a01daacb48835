#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcap {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

/// Run the full acceptance battery: closed-form curvature oracles, the
/// identity suite with negative controls, model-transform certificates, the
/// manufactured-solution convergence study, degenerate continuation with
/// the estimate boundedness regressions, the maximum-principle and
/// trace-bound margins, the kappa1 gradient cross-check, and output
/// determinism. Artifacts for the determinism check land under out_dir.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::string& out_dir);

/// Formats one pass/fail line per criterion.
std::string format_result_line(const CriterionResult& r);

}  // namespace hcap
