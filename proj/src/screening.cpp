#include "cenbar/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cenbar/error.hpp"

namespace cenbar {

std::size_t default_k(std::size_t n) {
    if (n < 2) {
        throw InputError("default_k needs n >= 2");
    }
    const double v = 2.0 * std::log(static_cast<double>(n)) * std::pow(static_cast<double>(n), 0.25);
    return static_cast<std::size_t>(std::llround(v));
}

ScreenResult MarginalScreener::screen(const StandardizedDesign& design,
                                      const SyntheticResponse& ystar, std::size_t k) const {
    return marginal_screen(design, ystar, k);
}

ScreenResult marginal_screen(const StandardizedDesign& design, const SyntheticResponse& ystar,
                             std::size_t k) {
    const auto p = static_cast<std::size_t>(design.cols());
    if (k < 1 || k > p) {
        throw InputError("screening size k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(p) + "]");
    }
    if (design.rows() != ystar.values.size()) {
        throw InputError("design and response differ in row count");
    }
    ScreenResult out;
    out.k = k;
    out.scores = (design.matrix.transpose() * ystar.centered()).cwiseAbs();
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.scores[static_cast<Eigen::Index>(a)] > out.scores[static_cast<Eigen::Index>(b)];
    });
    order.resize(k);
    out.kept = std::move(order);
    return out;
}

StandardizedDesign restrict_columns(const StandardizedDesign& design,
                                    const std::vector<std::size_t>& kept) {
    std::vector<Eigen::Index> idx(kept.begin(), kept.end());
    std::sort(idx.begin(), idx.end());
    StandardizedDesign out;
    out.matrix = design.matrix(Eigen::all, idx);
    out.col_means = design.col_means(idx);
    out.col_norms = design.col_norms(idx);
    return out;
}

TwoStepFit two_step_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
                        std::size_t k, const CvOptions& options, const Screener& screener) {
    const auto p = static_cast<std::size_t>(design.cols());
    TwoStepFit out;
    if (k >= p) {
        out.screen.k = p;
        out.screen.kept.resize(p);
        std::iota(out.screen.kept.begin(), out.screen.kept.end(), std::size_t{0});
        out.screen.scores = (design.matrix.transpose() * ystar.centered()).cwiseAbs();
        auto tuned = tune_and_fit(design, ystar, options);
        out.fit = std::move(tuned.fit);
        out.cv = std::move(tuned.cv);
        return out;
    }

    out.screen = screener.screen(design, ystar, k);
    if (!(out.screen.scores.size() > 0 && out.screen.scores.maxCoeff() > 0.0)) {
        // response orthogonal to every column: the null model, no tuning needed
        out.fit.beta_std = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
        out.fit.beta_orig = out.fit.beta_std;
        out.fit.intercept = ystar.center;
        out.fit.converged = true;
        out.cv.best_error = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    std::vector<std::size_t> cols = out.screen.kept;
    std::sort(cols.begin(), cols.end());
    auto tuned = tune_and_fit(restrict_columns(design, cols), ystar, options);
    out.cv = std::move(tuned.cv);

    BarFit& reduced = tuned.fit;
    out.fit = reduced;
    out.fit.beta_std = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    out.fit.beta_orig = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    out.fit.support.clear();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto src = static_cast<Eigen::Index>(c);
        const auto dst = static_cast<Eigen::Index>(cols[c]);
        out.fit.beta_std[dst] = reduced.beta_std[src];
        out.fit.beta_orig[dst] = reduced.beta_orig[src];
        if (reduced.beta_std[src] != 0.0) {
            out.fit.support.push_back(cols[c]);
        }
    }
    return out;
}

TwoStepFit two_step_fit(const SurvivalDataset& data, std::size_t k, std::uint64_t cv_seed) {
    data.validate();
    const StandardizedDesign design = standardize(data.covariates);
    const SyntheticResponse ystar = leurgans_transform(data);
    CvOptions options;
    options.seed = cv_seed;
    return two_step_fit(design, ystar, k, options);
}

}  // namespace cenbar
