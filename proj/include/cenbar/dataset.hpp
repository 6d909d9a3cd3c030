#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cenbar {

/// Right-censored observations (T_i, delta_i, x_i).
///
/// `times` may be negative (log-scale survival times are the usual input).
/// `events[i] == 1` means the observation is uncensored.
struct SurvivalDataset {
    Eigen::VectorXd times;
    std::vector<int> events;
    Eigen::MatrixXd covariates;
    std::vector<std::string> covariate_names;

    std::size_t rows() const { return static_cast<std::size_t>(times.size()); }
    std::size_t cols() const { return static_cast<std::size_t>(covariates.cols()); }

    /// Throws InputError when lengths disagree, n < 2, an entry is not
    /// finite, or an event code is outside {0, 1}.
    void validate() const;

    /// Rows in the given order; covariate names are kept.
    SurvivalDataset subset(std::span<const std::size_t> rows) const;

    double censored_fraction() const;
};

/// Builds a dataset from parallel arrays and default names x1..xp, then validates it.
SurvivalDataset make_dataset(Eigen::VectorXd times, std::vector<int> events,
                             Eigen::MatrixXd covariates);

}  // namespace cenbar
