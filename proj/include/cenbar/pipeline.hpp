#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cenbar/bar.hpp"
#include "cenbar/dataset.hpp"
#include "cenbar/screening.hpp"
#include "cenbar/tuning.hpp"

namespace cenbar {

struct FitOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    /// Skip CV and fit at exactly these values.
    std::optional<double> xi;
    std::optional<double> lambda;
    /// Screen to k columns first; 0 means default_k(n).
    std::optional<std::size_t> screen_k;
    bool per_fold_transform = false;
    BarConfig base;
};

struct FitOutcome {
    BarFit fit;  ///< length p; beta_orig is on the raw covariate scale
    std::vector<std::string> names;
    std::optional<CvResult> cv;
    std::optional<ScreenResult> screen;
    std::size_t n = 0;
    double censored_fraction = 0.0;
};

/// Standardize, build Y*, optionally screen, then tune by CV (unless both xi
/// and lambda are fixed) and fit. A constant column is reported by name.
FitOutcome fit_dataset(const SurvivalDataset& data, const FitOptions& options);

/// JSON document describing a fit ("cenbar-fit/1").
std::string fit_report_json(const FitOutcome& outcome);

}  // namespace cenbar
