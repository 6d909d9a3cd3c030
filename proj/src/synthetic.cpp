#include "cenbar/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cenbar {

SyntheticResponse leurgans_transform(std::span<const double> times, const StepSurvivor& survivor) {
    if (times.empty()) {
        throw InputError("cannot transform an empty dataset");
    }
    const double upper = *std::max_element(times.begin(), times.end());

    std::vector<double> grid(times.begin(), times.end());
    grid.push_back(0.0);
    for (double b : survivor.breakpoints) {
        if (b <= upper) {
            grid.push_back(b);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    while (grid.back() > upper) {
        grid.pop_back();
    }

    // excess[k] = sum over intervals [u_m, u_{m+1}) with m < k of len * (1/S - 1)
    std::vector<double> excess(grid.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double len = grid[k + 1] - grid[k];
        const double s = survivor.at(grid[k]);
        if (s < 1.0) {
            if (!(s > 0.0)) {
                throw NumericalError("censoring survivor is zero on [" + std::to_string(grid[k]) +
                                     ", " + std::to_string(grid[k + 1]) +
                                     "); synthetic response undefined");
            }
            acc += len * (1.0 / s - 1.0);
        }
        excess[k + 1] = acc;
    }

    SyntheticResponse out;
    out.values.resize(static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto pos = std::lower_bound(grid.begin(), grid.end(), times[i]) - grid.begin();
        out.values[static_cast<Eigen::Index>(i)] = times[i] + excess[static_cast<std::size_t>(pos)];
    }
    if (!out.values.allFinite()) {
        throw NumericalError("synthetic response is not finite");
    }
    out.center = out.values.mean();
    return out;
}

SyntheticResponse leurgans_transform(const SurvivalDataset& data, const StepSurvivor& survivor) {
    return leurgans_transform(std::span<const double>(data.times.data(), data.rows()), survivor);
}

SyntheticResponse leurgans_transform(const SurvivalDataset& data) {
    return leurgans_transform(data, fit_censoring_survivor(data));
}

StandardizedDesign standardize(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) {
        throw InputError("cannot standardize an empty design");
    }
    StandardizedDesign out;
    out.col_means = x.colwise().mean().transpose();
    out.matrix = x.rowwise() - out.col_means.transpose();
    out.col_norms = out.matrix.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!(out.col_norms[j] >= 1e-12)) {
            throw ConstantColumnError(static_cast<std::size_t>(j),
                                      "column " + std::to_string(j + 1) +
                                          " is constant (zero variance after centering)");
        }
        out.matrix.col(j) /= out.col_norms[j];
    }
    return out;
}

OriginalScaleCoefficients destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                                     const StandardizedDesign& design,
                                                     double response_center) {
    if (beta_std.size() != design.col_norms.size()) {
        throw InputError("coefficient length does not match design width");
    }
    OriginalScaleCoefficients out;
    out.beta = beta_std.cwiseQuotient(design.col_norms);
    out.intercept = response_center - out.beta.dot(design.col_means);
    return out;
}

}  // namespace cenbar
