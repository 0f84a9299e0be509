#pragma once

// Fast self-checks behind `qotto validate`: closed forms against numerical
// oracles, the fast kernels against the reference integrators, and the
// random streams. None of them runs an ensemble.

#include <string>
#include <vector>

#include "qotto/engine.hpp"

namespace qotto {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_validation(const CycleConfig& config);

}  // namespace qotto
