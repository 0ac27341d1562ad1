#pragma once

#include <string>
#include <vector>

#include "mappo/losses.hpp"

namespace mappo {

struct GradCheckTrial {
    Objective objective;
    int trial = 0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    double tolerance = 1e-5;
    double h = 1e-5;
    std::vector<GradCheckTrial> worst_per_objective;  // one entry per objective
    bool passed = false;
};

/// Randomized closed-form vs central-finite-difference comparison for every
/// objective. `corrupt_gradient` injects a deliberate error so detector
/// sensitivity is testable.
GradCheckReport run_gradcheck(int n_trials, std::uint64_t seed,
                              double h = 1e-5, double tolerance = 1e-5,
                              bool corrupt_gradient = false);

/// Relative error ||a - b|| / max(||b||, floor).
double gradient_rel_error(const Vec& a, const Vec& b, double floor = 1e-12);

std::string format_gradcheck_report(const GradCheckReport& report);

}  // namespace mappo
