#include "cenbar/dataset.hpp"

#include <cmath>
#include <string>

#include "cenbar/error.hpp"

namespace cenbar {

void SurvivalDataset::validate() const {
    const auto n = times.size();
    if (n == 0) {
        throw InputError("dataset is empty");
    }
    if (n < 2) {
        throw InputError("dataset needs at least 2 observations, got " + std::to_string(n));
    }
    if (static_cast<Eigen::Index>(events.size()) != n || covariates.rows() != n) {
        throw InputError("times, events and covariate rows differ in length");
    }
    if (!covariate_names.empty() &&
        static_cast<Eigen::Index>(covariate_names.size()) != covariates.cols()) {
        throw InputError("covariate name count does not match column count");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(times[i])) {
            throw InputError("non-finite time at row " + std::to_string(i + 1));
        }
        const int e = events[static_cast<std::size_t>(i)];
        if (e != 0 && e != 1) {
            throw InputError("event code " + std::to_string(e) + " at row " +
                             std::to_string(i + 1) + " is not 0 or 1");
        }
    }
    if (!covariates.allFinite()) {
        throw InputError("covariate matrix has non-finite entries");
    }
}

SurvivalDataset SurvivalDataset::subset(std::span<const std::size_t> rows) const {
    SurvivalDataset out;
    const auto m = static_cast<Eigen::Index>(rows.size());
    out.times.resize(m);
    out.events.resize(rows.size());
    out.covariates.resize(m, covariates.cols());
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
        out.times[r] = times[src];
        out.events[static_cast<std::size_t>(r)] = events[static_cast<std::size_t>(src)];
        out.covariates.row(r) = covariates.row(src);
    }
    out.covariate_names = covariate_names;
    return out;
}

double SurvivalDataset::censored_fraction() const {
    if (events.empty()) {
        return 0.0;
    }
    std::size_t censored = 0;
    for (int e : events) {
        censored += (e == 0) ? 1 : 0;
    }
    return static_cast<double>(censored) / static_cast<double>(events.size());
}

SurvivalDataset make_dataset(Eigen::VectorXd times, std::vector<int> events,
                             Eigen::MatrixXd covariates) {
    SurvivalDataset d;
    d.times = std::move(times);
    d.events = std::move(events);
    d.covariates = std::move(covariates);
    d.covariate_names.reserve(static_cast<std::size_t>(d.covariates.cols()));
    for (Eigen::Index j = 0; j < d.covariates.cols(); ++j) {
        d.covariate_names.push_back("x" + std::to_string(j + 1));
    }
    d.validate();
    return d;
}

}  // namespace cenbar
