#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cenbar/bar.hpp"
#include "cenbar/synthetic.hpp"

namespace cenbar {

/// Log-spaced (xi, lambda) paths on [lower, upper].
struct TuningGrid {
    std::vector<double> xi_values;
    std::vector<double> lambda_values;
    double lower = 1e-4;
    double upper = 0.0;
};

/// `count` points equally spaced in log scale from lower to upper inclusive.
std::vector<double> log_spaced(double lower, double upper, std::size_t count);

/// lower = 1e-4, upper = max_j (x_j' y*_c)^2 / 4 with y*_c the centered
/// synthetic response; ten points on each path. Throws DegenerateError when
/// upper <= lower.
TuningGrid make_grid(const StandardizedDesign& design, const SyntheticResponse& ystar,
                     std::size_t points = 10);

/// Seeded uniform partition of {0..n-1} into k folds whose sizes differ by at
/// most one. Each fold is sorted.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Raw outcome, needed only when the synthetic response is rebuilt per fold.
struct CensoredOutcome {
    std::span<const double> times;
    std::span<const int> events;
};

struct CvOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    /// tol / max_iter / zero_threshold for every fit; xi and lambda are ignored.
    BarConfig base;
    /// Recompute the censoring survivor and Y* on each training fold. Held-out
    /// rows are always scored against the full-data Y*. Requires `outcome`.
    bool per_fold_transform = false;
    const CensoredOutcome* outcome = nullptr;
};

struct CvResult {
    /// errors(a, b) is the fold-averaged held-out MSE at (xi_values[a], lambda_values[b]);
    /// +inf marks a cell whose fit failed.
    Eigen::MatrixXd errors;
    double best_xi = 0.0;
    double best_lambda = 0.0;
    std::size_t best_xi_index = 0;
    std::size_t best_lambda_index = 0;
    double best_error = 0.0;
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;
    FitStats stats;
};

/// Picks the minimum of an error matrix; exact ties go to the larger column
/// (lambda) index, then the larger row (xi) index.
void select_best_cell(const Eigen::MatrixXd& errors, std::size_t& row, std::size_t& col);

/// K-fold CV over the full Cartesian (xi, lambda) grid.
///
/// Each training fold is re-standardized, fitted with bar_fit, mapped back to
/// the scale of `design`, and scored on the held-out rows against y*. Failed
/// fits mark their cell +inf instead of aborting.
CvResult cross_validate(const StandardizedDesign& design, const SyntheticResponse& ystar,
                        const TuningGrid& grid, const CvOptions& options);

struct TunedBarFit {
    BarFit fit;
    CvResult cv;
    TuningGrid grid;
};

/// make_grid + cross_validate + bar_fit at the selected cell on all rows.
TunedBarFit tune_and_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
                         const CvOptions& options);

}  // namespace cenbar
