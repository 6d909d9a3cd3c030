#pragma once

#include <span>
#include <vector>

#include "cenbar/dataset.hpp"

namespace cenbar {

/// Right-continuous, non-increasing step function with value 1 to the left of
/// the first breakpoint. values[k] holds on [breakpoints[k], breakpoints[k+1]).
struct StepSurvivor {
    std::vector<double> breakpoints;
    std::vector<double> values;

    static constexpr double left_value = 1.0;

    /// Post-jump value at s (right-continuous).
    double at(double s) const;
    /// Value on the interval immediately left of s, i.e. S(s-).
    double left_limit(double s) const;
};

/// Product-limit estimate of the censoring survivor 1 - H from (T_i, 1 - delta_i).
///
/// Jumps happen only at censored times. At a tied time the uncensored
/// observations leave the risk set first, so the censoring factor there is
/// 1 - d_cens / (r - d_fail).
StepSurvivor fit_censoring_survivor(std::span<const double> times, std::span<const int> events);
StepSurvivor fit_censoring_survivor(const SurvivalDataset& data);

/// Free-function spelling of StepSurvivor::left_limit.
inline double survivor_left(const StepSurvivor& step, double s) { return step.left_limit(s); }

}  // namespace cenbar
