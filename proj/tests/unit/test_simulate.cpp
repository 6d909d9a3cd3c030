#include <doctest.h>

#include <cmath>
#include <vector>

#include "cenbar/error.hpp"
#include "cenbar/screening.hpp"
#include "cenbar/simulate.hpp"

using namespace cenbar;

TEST_CASE("default coefficient vectors") {
    const auto b1 = Scenario::default_beta0(1, 10);
    CHECK(b1.size() == 10);
    CHECK(b1[0] == 3.0);
    CHECK(b1[1] == -2.0);
    CHECK(b1[4] == 6.0);
    CHECK(b1.cwiseAbs().sum() == 11.0);
    const auto b2 = Scenario::default_beta0(2, 8);
    CHECK(b2[3] == 0.3);
    CHECK(b2[5] == 0.6);
    CHECK(b2[6] == 0.0);
}

TEST_CASE("scenario validation names the field") {
    Scenario s = Scenario::defaults(1, 100, 10);
    CHECK_NOTHROW(s.validate());
    s.rho = 1.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("rho"), InputError);
    s = Scenario::defaults(1, 100, 10);
    s.beta0 = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("beta0"), InputError);
    s = Scenario::defaults(3, 100, 10);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("model"), InputError);
}

TEST_CASE("seed derivation separates streams") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("calibration is monotone in the target rate") {
    Scenario s = Scenario::defaults(1, 100, 10);
    s.censoring_rate = 0.1;
    const double c10 = calibrate_censoring_mean(s);
    s.censoring_rate = 0.5;
    const double c50 = calibrate_censoring_mean(s);
    CHECK(c10 > c50);
    s.censoring_rate = 0.0;
    CHECK(std::isinf(calibrate_censoring_mean(s)));
}

TEST_CASE("generated censoring rates track the target") {
    for (double rate : {0.2, 0.5}) {
        Scenario s = Scenario::defaults(1, 100, 10);
        s.censoring_rate = rate;
        const double c = calibrate_censoring_mean(s);
        double total = 0.0;
        for (std::size_t rep = 0; rep < 100; ++rep) {
            total += generate(s, c, rep).data.censored_fraction();
        }
        const double mean = total / 100.0;
        MESSAGE("target " << rate << ", mean generated " << mean);
        CHECK(std::fabs(mean - rate) <= (rate == 0.2 ? 0.02 : 0.05));
    }
}

TEST_CASE("generation is reproducible per replication") {
    Scenario s = Scenario::defaults(2, 30, 6);
    const double c = calibrate_censoring_mean(s);
    const auto a = generate(s, c, 5);
    const auto b = generate(s, c, 5);
    const auto other = generate(s, c, 6);
    CHECK(a.data.times == b.data.times);
    CHECK(a.data.covariates == b.data.covariates);
    CHECK(a.data.events == b.data.events);
    CHECK(a.data.times != other.data.times);
}

TEST_CASE("covariate correlation structure") {
    Scenario s = Scenario::defaults(1, 10000, 5);
    s.rho = 0.5;
    auto x = generate(s, 0.0, 0).data.covariates;
    Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = c.transpose() * c / 9999.0;
    const double corr13 = cov(0, 2) / std::sqrt(cov(0, 0) * cov(2, 2));
    CHECK(std::fabs(corr13 - 0.25) <= 0.03);

    s = Scenario::defaults(1, 400, 4);
    s.rho = 0.0;
    x = generate(s, 0.0, 1).data.covariates;
    c = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd sd = (c.colwise().squaredNorm()).cwiseSqrt();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(std::fabs(c.col(i).dot(c.col(j)) / (sd[i] * sd[j])) <= 3.0 / std::sqrt(400.0));
}

TEST_CASE("selection metrics") {
    const Eigen::VectorXd truth = Scenario::default_beta0(1, 10);
    auto r = score_selection({0, 1, 4}, {0, 1, 4}, truth, truth, 1.0);
    CHECK(r.misc == 0.0);
    CHECK(r.tm == 1.0);
    CHECK(r.sm == 1.0);
    CHECK(r.mab == 0.0);

    Eigen::VectorXd est = truth;
    est[4] = 0.0;
    r = score_selection({0, 1}, {0, 1, 4}, est, truth, 2.0);
    CHECK(r.fp == 0.0);
    CHECK(r.fn == 1.0);
    CHECK(r.sm == doctest::Approx(2.0 / std::sqrt(6.0)));
    CHECK(r.mab == doctest::Approx(0.6));
    CHECK(r.mspe == 2.0);

    r = score_selection({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0, 1, 4}, truth, truth, 0.0);
    CHECK(r.fp == 7.0);
    CHECK(r.tm == 0.0);
    CHECK(r.sm == doctest::Approx(3.0 / std::sqrt(30.0)));

    CHECK(score_selection({}, {}, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 0).sm == 1.0);
    CHECK(score_selection({1}, {}, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 0).sm == 0.0);
}

TEST_CASE("method names") {
    CHECK(parse_method("alasso") == Method::alasso);
    CHECK_FALSE(parse_method("ridge").has_value());
    CHECK(all_methods().size() == 5);
}

TEST_CASE("single replication report equals that replication's record") {
    Scenario s = Scenario::defaults(1, 60, 6);
    s.reps = 1;
    MonteCarloOptions opt;
    opt.methods = {Method::cbar, Method::lasso};
    const auto rep = run_monte_carlo(s, opt);
    REQUIRE(rep.methods.size() == 2);
    for (const auto& m : rep.methods) {
        CHECK(m.metrics.reps == 1);
        CHECK(m.failures == 0);
        CHECK(m.metrics.misc == m.metrics.fp + m.metrics.fn);
        CHECK((m.metrics.tm == 0.0 || m.metrics.tm == 1.0));
    }
    CHECK(rep.k_used == 6);
}

TEST_CASE("reports do not depend on thread count") {
    Scenario s = Scenario::defaults(1, 50, 8);
    s.reps = 6;
    MonteCarloOptions opt;
    opt.methods = {Method::cbar, Method::scad};
    const auto one = run_monte_carlo(s, opt);
    opt.threads = 3;
    const auto three = run_monte_carlo(s, opt);
    for (std::size_t i = 0; i < one.methods.size(); ++i) {
        CHECK(one.methods[i].metrics.misc == three.methods[i].metrics.misc);
        CHECK(one.methods[i].metrics.mspe == three.methods[i].metrics.mspe);
        CHECK(one.methods[i].metrics.mab == three.methods[i].metrics.mab);
    }
    CHECK(one.mean_censored_fraction == three.mean_censored_fraction);
}

TEST_CASE("screening inside the harness") {
    Scenario s = Scenario::defaults(1, 80, 120);
    s.reps = 2;
    MonteCarloOptions opt;
    opt.use_screening = true;
    const auto rep = run_monte_carlo(s, opt);
    CHECK(rep.k_used == default_k(80));
    CHECK(rep.methods[0].failures == 0);
    opt.k = 500;
    CHECK(run_monte_carlo(s, opt).k_used == 120);
}
