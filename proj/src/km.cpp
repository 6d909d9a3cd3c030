#include "cenbar/km.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cenbar/error.hpp"

namespace cenbar {

double StepSurvivor::at(double s) const {
    // first breakpoint strictly greater than s; the one before it is <= s
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
    if (it == breakpoints.begin()) {
        return left_value;
    }
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double StepSurvivor::left_limit(double s) const {
    // last breakpoint strictly below s
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), s);
    if (it == breakpoints.begin()) {
        return left_value;
    }
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

StepSurvivor fit_censoring_survivor(std::span<const double> times, std::span<const int> events) {
    if (times.empty()) {
        throw InputError("cannot fit a survivor to an empty dataset");
    }
    if (times.size() != events.size()) {
        throw InputError("times and events differ in length");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i] != 0 && events[i] != 1) {
            throw InputError("event code " + std::to_string(events[i]) + " at row " +
                             std::to_string(i + 1) + " is not 0 or 1");
        }
    }

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    StepSurvivor out;
    double surv = 1.0;
    std::size_t at_risk = times.size();
    std::size_t k = 0;
    while (k < order.size()) {
        const double t = times[order[k]];
        std::size_t failures = 0;
        std::size_t censored = 0;
        std::size_t m = k;
        for (; m < order.size() && times[order[m]] == t; ++m) {
            if (events[order[m]] == 1) {
                ++failures;
            } else {
                ++censored;
            }
        }
        if (censored > 0) {
            const auto risk = static_cast<double>(at_risk - failures);
            surv *= 1.0 - static_cast<double>(censored) / risk;
            out.breakpoints.push_back(t);
            out.values.push_back(surv);
        }
        at_risk -= failures + censored;
        k = m;
    }
    return out;
}

StepSurvivor fit_censoring_survivor(const SurvivalDataset& data) {
    return fit_censoring_survivor(std::span<const double>(data.times.data(), data.rows()),
                                  std::span<const int>(data.events));
}

}  // namespace cenbar
