#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cenbar/error.hpp"
#include "cenbar/simulate.hpp"
#include "cenbar/tuning.hpp"

using namespace cenbar;

namespace {

SyntheticResponse response(const Eigen::VectorXd& v) {
    SyntheticResponse y;
    y.values = v;
    y.center = v.mean();
    return y;
}

}  // namespace

TEST_CASE("grid upper end from the largest marginal correlation") {
    StandardizedDesign d;
    d.matrix = Eigen::MatrixXd(2, 1);
    d.matrix << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    d.col_means = Eigen::VectorXd::Zero(1);
    d.col_norms = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd y(2);
    y << -std::sqrt(2.0), std::sqrt(2.0);  // x'y = 2
    const auto grid = make_grid(d, response(y));
    CHECK(grid.upper == doctest::Approx(1.0));
    CHECK(grid.lower == 1e-4);
    REQUIRE(grid.xi_values.size() == 10);
    CHECK(grid.xi_values.front() == 1e-4);
    CHECK(grid.xi_values.back() == grid.upper);
    for (std::size_t k = 1; k < 10; ++k) {
        CHECK(std::log(grid.xi_values[k] / grid.xi_values[k - 1]) ==
              doctest::Approx(std::log(1e4) / 9.0));
    }
    CHECK(grid.lambda_values == grid.xi_values);
}

TEST_CASE("degenerate grids") {
    StandardizedDesign d;
    d.matrix = Eigen::MatrixXd(2, 1);
    d.matrix << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK_THROWS_AS(make_grid(d, response(Eigen::VectorXd::Ones(2))), DegenerateError);
    // (x'y)^2 / 4 == 1e-4 exactly leaves an empty range
    Eigen::VectorXd y(2);
    y << -0.02 / std::sqrt(2.0), 0.02 / std::sqrt(2.0);
    const double c = d.matrix.col(0).dot(y);
    INFO("x'y = " << c);
    if (c * c / 4.0 <= 1e-4) {
        CHECK_THROWS_AS(make_grid(d, response(y)), DegenerateError);
    }
    CHECK_THROWS_AS(log_spaced(1.0, 1.0, 5), DegenerateError);
}

TEST_CASE("fold partitions") {
    auto folds = kfold_split(10, 5, 1);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> all;
    for (const auto& f : folds) {
        CHECK(f.size() == 2);
        CHECK(std::is_sorted(f.begin(), f.end()));
        all.insert(f.begin(), f.end());
    }
    CHECK(all.size() == 10);
    CHECK(kfold_split(10, 5, 1) == folds);
    CHECK(kfold_split(10, 5, 2) != folds);

    folds = kfold_split(7, 5, 3);
    std::vector<std::size_t> sizes;
    for (const auto& f : folds) sizes.push_back(f.size());
    CHECK(sizes == std::vector<std::size_t>{2, 2, 1, 1, 1});

    CHECK_THROWS_AS(kfold_split(3, 5, 1), InputError);
    CHECK_THROWS_AS(kfold_split(10, 1, 1), InputError);
}

TEST_CASE("best cell prefers larger lambda then larger xi on ties") {
    Eigen::MatrixXd e(3, 3);
    e << 5, 1, 2,
         1, 3, 1,
         4, 1, 9;
    std::size_t r = 0, c = 0;
    select_best_cell(e, r, c);
    CHECK(c == 2);
    CHECK(r == 1);
    e(1, 2) = 7;
    select_best_cell(e, r, c);
    CHECK(c == 1);
    CHECK(r == 2);
}

TEST_CASE("single-cell grid reproduces plain K-fold error") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(40, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
    Eigen::VectorXd y = 1.5 * x.col(0) - x.col(2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += 0.5 * z(rng);
    const auto design = standardize(x);
    const auto ys = response(y);
    TuningGrid grid;
    grid.xi_values = {0.3};
    grid.lambda_values = {0.2};
    CvOptions opt;
    opt.seed = 99;
    const auto cv = cross_validate(design, ys, grid, opt);

    // by hand: standardize each training fold, fit, score on held-out rows
    double total = 0.0;
    for (const auto& test : kfold_split(40, 5, 99)) {
        std::vector<Eigen::Index> tr, te;
        for (Eigen::Index i = 0; i < 40; ++i) {
            const bool held = std::find(test.begin(), test.end(), static_cast<std::size_t>(i)) != test.end();
            (held ? te : tr).push_back(i);
        }
        const auto d_tr = standardize(design.matrix(tr, Eigen::all));
        const auto fit = bar_fit(d_tr, response(y(tr)), BarConfig{0.3, 0.2});
        const Eigen::VectorXd pred = (design.matrix(te, Eigen::all) * fit.beta_orig).array() + fit.intercept;
        total += (y(te) - pred).squaredNorm() / static_cast<double>(te.size());
    }
    CHECK(cv.best_error == doctest::Approx(total / 5.0).epsilon(1e-12));
    CHECK(cv.best_xi == 0.3);
    CHECK(cv.best_lambda == 0.2);
    CHECK(cv.stats.fits == 5);
}

TEST_CASE("pure noise selects at most one spurious covariate in most runs") {
    // The top of the lambda path is max_j (x_j'y*)^2 / 4, which puts the
    // strongest noise column right at the scalar double root, so the largest
    // cell often keeps that one column instead of returning the empty model.
    Scenario sc = Scenario::defaults(1, 100, 10);
    sc.beta0 = Eigen::VectorXd::Zero(10);
    const double c = calibrate_censoring_mean(sc);
    int empty = 0, at_most_one = 0;
    double total_fp = 0.0;
    const int runs = 100;
    for (int rep = 0; rep < runs; ++rep) {
        const auto gen = generate(sc, c, static_cast<std::size_t>(rep));
        const auto design = standardize(gen.data.covariates);
        const auto ys = leurgans_transform(gen.data);
        CvOptions opt;
        opt.seed = static_cast<std::uint64_t>(rep);
        const auto tuned = tune_and_fit(design, ys, opt);
        const auto k = tuned.fit.support.size();
        empty += k == 0;
        at_most_one += k <= 1;
        total_fp += static_cast<double>(k);
    }
    MESSAGE("empty: " << empty << ", at most one: " << at_most_one << ", mean size "
                      << total_fp / runs);
    CHECK(at_most_one > runs / 2);
    CHECK(empty >= runs / 4);
    CHECK(total_fp / runs < 1.5);
}

TEST_CASE("tuned fit on Model 1 data") {
    Scenario sc = Scenario::defaults(1, 100, 10);
    const double c = calibrate_censoring_mean(sc);
    const auto gen = generate(sc, c, 0);
    const auto design = standardize(gen.data.covariates);
    const auto ys = leurgans_transform(gen.data);
    const auto tuned = tune_and_fit(design, ys, CvOptions{});
    CHECK(tuned.fit.converged);
    CHECK(std::isfinite(tuned.cv.best_error));
    // same order of magnitude as a unit-variance-error model inflated by censoring
    CHECK(tuned.cv.best_error > 1.0);
    CHECK(tuned.cv.best_error < 100.0);
    CHECK(tuned.cv.stats.residual_violations == 0);
    for (auto j : {0, 1, 4}) {
        CHECK(tuned.fit.beta_std[j] != 0.0);
    }
}

TEST_CASE("per-fold transform needs the raw outcome") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(30, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
    std::vector<double> t(30);
    std::vector<int> d(30);
    for (int i = 0; i < 30; ++i) {
        t[i] = 2.0 * x(i, 0) + z(rng);
        d[i] = i % 4 != 0;
    }
    const auto design = standardize(x);
    const auto ys = leurgans_transform(t, fit_censoring_survivor(t, d));
    CvOptions opt;
    opt.per_fold_transform = true;
    CHECK_THROWS_AS(tune_and_fit(design, ys, opt), InputError);
    const CensoredOutcome outcome{t, d};
    opt.outcome = &outcome;
    const auto tuned = tune_and_fit(design, ys, opt);
    CHECK(std::isfinite(tuned.cv.best_error));
    const auto plain = tune_and_fit(design, ys, CvOptions{});
    CHECK(tuned.cv.best_error != plain.cv.best_error);
}
