#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "cenbar/error.hpp"
#include "cenbar/screening.hpp"
#include "cenbar/simulate.hpp"

using namespace cenbar;

namespace {

SyntheticResponse response(const Eigen::VectorXd& v) {
    SyntheticResponse y;
    y.values = v;
    y.center = v.mean();
    return y;
}

StandardizedDesign random_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
    return standardize(x);
}

}  // namespace

TEST_CASE("default screened size") {
    CHECK(default_k(200) == 40);
    CHECK(default_k(240) == 43);
    CHECK(default_k(136) == 34);
    CHECK(default_k(3) == 3);
    CHECK_THROWS_AS(default_k(1), InputError);
}

TEST_CASE("k = p keeps everything") {
    std::mt19937_64 rng(31);
    const auto d = random_design(rng, 20, 6);
    const auto y = response(d.matrix.col(2) * 3.0);
    const auto s = marginal_screen(d, y, 6);
    auto kept = s.kept;
    std::sort(kept.begin(), kept.end());
    CHECK(kept == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK(s.kept.front() == 2);
    CHECK_THROWS_AS(marginal_screen(d, y, 0), InputError);
    CHECK_THROWS_AS(marginal_screen(d, y, 7), InputError);
}

TEST_CASE("response aligned with one orthogonal column") {
    StandardizedDesign d;
    d.matrix = Eigen::MatrixXd::Zero(8, 4);
    // four mutually orthogonal mean-zero unit columns
    const double h = 1.0 / std::sqrt(8.0);
    const int signs[4][8] = {{1, 1, 1, 1, -1, -1, -1, -1},
                             {1, 1, -1, -1, 1, 1, -1, -1},
                             {1, -1, 1, -1, 1, -1, 1, -1},
                             {1, -1, -1, 1, 1, -1, -1, 1}};
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 8; ++i) d.matrix(i, j) = h * signs[j][i];
    d.col_means = Eigen::VectorXd::Zero(4);
    d.col_norms = Eigen::VectorXd::Ones(4);
    const auto s = marginal_screen(d, response(5.0 * d.matrix.col(3)), 1);
    CHECK(s.kept == std::vector<std::size_t>{3});
}

TEST_CASE("score ties go to the lower index") {
    StandardizedDesign d;
    d.matrix = Eigen::MatrixXd(4, 3);
    d.matrix << 1, 1, 0, -1, -1, 0, 0, 0, 1, 0, 0, -1;
    d.matrix /= std::sqrt(2.0);
    Eigen::VectorXd y(4);
    y << 1, -1, 0, 0;
    const auto s = marginal_screen(d, response(y), 1);
    CHECK(s.kept == std::vector<std::size_t>{0});
}

TEST_CASE("restrict keeps increasing column order") {
    std::mt19937_64 rng(32);
    const auto d = random_design(rng, 10, 5);
    const auto r = restrict_columns(d, {4, 1});
    CHECK(r.cols() == 2);
    CHECK(r.matrix.col(0) == d.matrix.col(1));
    CHECK(r.matrix.col(1) == d.matrix.col(4));
    CHECK(r.col_norms[1] == d.col_norms[4]);
}

TEST_CASE("k >= p matches the direct fit") {
    std::mt19937_64 rng(33);
    std::normal_distribution<double> z;
    const auto d = random_design(rng, 60, 5);
    Eigen::VectorXd y = 3.0 * d.matrix.col(0) - 2.0 * d.matrix.col(3);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += 0.2 * z(rng);
    const auto ys = response(y);
    const auto two = two_step_fit(d, ys, 5, CvOptions{});
    const auto direct = tune_and_fit(d, ys, CvOptions{});
    CHECK(two.fit.beta_std == direct.fit.beta_std);
    CHECK(two.fit.support == direct.fit.support);
    CHECK(two.cv.best_error == direct.cv.best_error);
}

TEST_CASE("null response gives the empty model") {
    std::mt19937_64 rng(34);
    const auto d = random_design(rng, 30, 50);
    const auto two = two_step_fit(d, response(Eigen::VectorXd::Constant(30, 2.0)), 5, CvOptions{});
    CHECK(two.fit.support.empty());
    CHECK(two.fit.beta_std.size() == 50);
    CHECK(two.fit.intercept == 2.0);
}

TEST_CASE("screened fit embeds back into p coordinates") {
    Scenario sc = Scenario::defaults(1, 100, 200);
    const double c = calibrate_censoring_mean(sc);
    const auto gen = generate(sc, c, 1);
    const auto two = two_step_fit(gen.data, default_k(100), 7);
    CHECK(two.fit.beta_std.size() == 200);
    CHECK(two.screen.kept.size() == default_k(100));
    for (auto j : two.fit.support) {
        CHECK(std::find(two.screen.kept.begin(), two.screen.kept.end(), j) != two.screen.kept.end());
    }
    for (Eigen::Index j = 0; j < 200; ++j) {
        const bool in = std::find(two.fit.support.begin(), two.fit.support.end(),
                                  static_cast<std::size_t>(j)) != two.fit.support.end();
        CHECK((two.fit.beta_std[j] != 0.0) == in);
    }
}

namespace {

// Replications (of 100) whose kept set contains each of x1, x2, x5, and all three.
std::array<int, 4> true_set_hits(double rho) {
    Scenario sc = Scenario::defaults(1, 200, 1000);
    sc.rho = rho;
    const double c = calibrate_censoring_mean(sc);
    const std::size_t k = default_k(200);
    std::array<int, 4> hits{};
    for (int rep = 0; rep < 100; ++rep) {
        const auto gen = generate(sc, c, static_cast<std::size_t>(rep));
        const auto d = standardize(gen.data.covariates);
        const auto s = marginal_screen(d, leurgans_transform(gen.data), k);
        bool all = true;
        int q = 0;
        for (std::size_t j : {0u, 1u, 4u}) {
            const bool in = std::find(s.kept.begin(), s.kept.end(), j) != s.kept.end();
            hits[static_cast<std::size_t>(q++)] += in;
            all = all && in;
        }
        hits[3] += all;
    }
    return hits;
}

}  // namespace

TEST_CASE("marginal screening keeps the true signals with independent covariates") {
    const auto hits = true_set_hits(0.0);
    MESSAGE("rho 0: true set kept in " << hits[3] << " of 100");
    CHECK(hits[3] >= 95);
}

TEST_CASE("marginal screening loses the masked signal at rho 0.5") {
    // cov(x2, y) = 3 rho - 2 + 6 rho^3 = 0.25: x2 is nearly invisible marginally
    const auto hits = true_set_hits(0.5);
    MESSAGE("rho 0.5: x1 " << hits[0] << ", x2 " << hits[1] << ", x5 " << hits[2]);
    CHECK(hits[0] >= 95);
    CHECK(hits[2] >= 95);
    CHECK(hits[1] < 50);
}
