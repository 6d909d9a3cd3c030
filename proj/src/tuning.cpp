#include "cenbar/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cenbar/error.hpp"
#include "cenbar/km.hpp"

namespace cenbar {

std::vector<double> log_spaced(double lower, double upper, std::size_t count) {
    if (!(lower > 0.0) || !(upper > lower)) {
        throw DegenerateError("log-spaced grid needs 0 < lower < upper");
    }
    if (count == 0) {
        return {};
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = upper;
        return out;
    }
    const double lo = std::log(lower);
    const double step = (std::log(upper) - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(lo + step * static_cast<double>(i));
    }
    out.front() = lower;
    out.back() = upper;
    return out;
}

TuningGrid make_grid(const StandardizedDesign& design, const SyntheticResponse& ystar,
                     std::size_t points) {
    if (design.rows() != ystar.values.size()) {
        throw InputError("design and response differ in row count");
    }
    const Eigen::VectorXd corr = design.matrix.transpose() * ystar.centered();
    TuningGrid grid;
    grid.upper = corr.size() == 0 ? 0.0 : corr.cwiseAbs2().maxCoeff() / 4.0;
    if (!(grid.upper > grid.lower)) {
        throw DegenerateError("tuning grid is empty: max_j (x_j'y*)^2/4 = " +
                              std::to_string(grid.upper) + " does not exceed 1e-4");
    }
    grid.xi_values = log_spaced(grid.lower, grid.upper, points);
    grid.lambda_values = grid.xi_values;
    return grid;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw InputError("fold count must satisfy 2 <= k <= n (k = " + std::to_string(k) +
                         ", n = " + std::to_string(n) + ")");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) {
        folds[i % k].push_back(perm[i]);
    }
    for (auto& f : folds) {
        std::sort(f.begin(), f.end());
    }
    return folds;
}

void select_best_cell(const Eigen::MatrixXd& errors, std::size_t& row, std::size_t& col) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (Eigen::Index b = errors.cols() - 1; b >= 0; --b) {
        for (Eigen::Index a = errors.rows() - 1; a >= 0; --a) {
            const double e = errors(a, b);
            if (!found || e < best) {
                best = e;
                row = static_cast<std::size_t>(a);
                col = static_cast<std::size_t>(b);
                found = true;
            }
        }
    }
    if (!found) {
        throw InputError("cannot select from an empty error matrix");
    }
}

CvResult cross_validate(const StandardizedDesign& design, const SyntheticResponse& ystar,
                        const TuningGrid& grid, const CvOptions& options) {
    const auto n = static_cast<std::size_t>(design.rows());
    if (static_cast<std::size_t>(ystar.values.size()) != n) {
        throw InputError("design and response differ in row count");
    }
    if (grid.xi_values.empty() || grid.lambda_values.empty()) {
        throw InputError("tuning grid has no cells");
    }
    if (options.per_fold_transform &&
        (options.outcome == nullptr || options.outcome->times.size() != n ||
         options.outcome->events.size() != n)) {
        throw InputError("per-fold transform requires the raw outcome for every row");
    }
    options.base.validate();

    const auto nx = static_cast<Eigen::Index>(grid.xi_values.size());
    const auto nl = static_cast<Eigen::Index>(grid.lambda_values.size());

    CvResult result;
    result.seed = options.seed;
    result.folds = kfold_split(n, options.folds, options.seed);
    result.errors = Eigen::MatrixXd::Zero(nx, nl);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> failed =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(nx, nl, false);
    const double fold_weight = 1.0 / static_cast<double>(result.folds.size());

    std::vector<char> in_test(n);
    for (const auto& test : result.folds) {
        std::fill(in_test.begin(), in_test.end(), 0);
        for (auto i : test) {
            in_test[i] = 1;
        }
        std::vector<Eigen::Index> train_rows;
        std::vector<Eigen::Index> test_rows;
        for (std::size_t i = 0; i < n; ++i) {
            (in_test[i] ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
        }

        const Eigen::MatrixXd x_train = design.matrix(train_rows, Eigen::all);
        const Eigen::MatrixXd x_test = design.matrix(test_rows, Eigen::all);
        const Eigen::VectorXd y_test = ystar.values(test_rows);
        Eigen::VectorXd y_train;
        if (options.per_fold_transform) {
            std::vector<double> t;
            std::vector<int> e;
            for (auto i : train_rows) {
                t.push_back(options.outcome->times[static_cast<std::size_t>(i)]);
                e.push_back(options.outcome->events[static_cast<std::size_t>(i)]);
            }
            try {
                y_train = leurgans_transform(t, fit_censoring_survivor(t, e)).values;
            } catch (const NumericalError&) {
                failed.setConstant(true);
                continue;
            }
        } else {
            y_train = ystar.values(train_rows);
        }

        StandardizedDesign train_design;
        try {
            train_design = standardize(x_train);
        } catch (const DegenerateError&) {
            failed.setConstant(true);
            continue;
        }
        const double y_mean = y_train.mean();
        const GramSystem sys =
            GramSystem::build(train_design.matrix, (y_train.array() - y_mean).matrix());

        for (Eigen::Index a = 0; a < nx; ++a) {
            BarConfig config = options.base;
            config.xi = grid.xi_values[static_cast<std::size_t>(a)];
            Eigen::VectorXd start;
            try {
                start = ridge_init(sys, config.xi);
            } catch (const NumericalError&) {
                failed.row(a).setConstant(true);
                continue;
            }
            for (Eigen::Index b = 0; b < nl; ++b) {
                if (failed(a, b)) {
                    continue;
                }
                config.lambda = grid.lambda_values[static_cast<std::size_t>(b)];
                try {
                    const BarFit fit = bar_iterate(sys, config, start);
                    result.stats.record(fit, config.tol);
                    const auto orig = destandardize_coefficients(fit.beta_std, train_design, y_mean);
                    const Eigen::VectorXd resid =
                        y_test - ((x_test * orig.beta).array() + orig.intercept).matrix();
                    result.errors(a, b) +=
                        fold_weight * resid.squaredNorm() / static_cast<double>(test_rows.size());
                } catch (const NumericalError&) {
                    failed(a, b) = true;
                }
            }
        }
    }

    for (Eigen::Index a = 0; a < nx; ++a) {
        for (Eigen::Index b = 0; b < nl; ++b) {
            if (failed(a, b) || !std::isfinite(result.errors(a, b))) {
                result.errors(a, b) = std::numeric_limits<double>::infinity();
            }
        }
    }
    select_best_cell(result.errors, result.best_xi_index, result.best_lambda_index);
    result.best_xi = grid.xi_values[result.best_xi_index];
    result.best_lambda = grid.lambda_values[result.best_lambda_index];
    result.best_error = result.errors(static_cast<Eigen::Index>(result.best_xi_index),
                                      static_cast<Eigen::Index>(result.best_lambda_index));
    return result;
}

TunedBarFit tune_and_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
                         const CvOptions& options) {
    TunedBarFit out;
    out.grid = make_grid(design, ystar);
    out.cv = cross_validate(design, ystar, out.grid, options);
    if (!std::isfinite(out.cv.best_error)) {
        throw NumericalError("every cross-validation cell failed");
    }
    BarConfig config = options.base;
    config.xi = out.cv.best_xi;
    config.lambda = out.cv.best_lambda;
    out.fit = bar_fit(design, ystar, config);
    out.cv.stats.record(out.fit, config.tol);
    return out;
}

}  // namespace cenbar
