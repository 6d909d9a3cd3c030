#include <doctest.h>

#include <random>
#include <vector>

#include "../support/oracles.hpp"
#include "cenbar/error.hpp"
#include "cenbar/km.hpp"

using cenbar::fit_censoring_survivor;

namespace {

cenbar::StepSurvivor fit(const std::vector<double>& t, const std::vector<int>& d) {
    return fit_censoring_survivor(t, d);
}

}  // namespace

TEST_CASE("no censoring gives a survivor of one everywhere") {
    const auto s = fit({1, 2, 3}, {1, 1, 1});
    CHECK(s.breakpoints.empty());
    for (double x : {-1e9, 0.0, 1.0, 2.5, 3.0, 1e9}) {
        CHECK(s.at(x) == 1.0);
        CHECK(s.left_limit(x) == 1.0);
    }
}

TEST_CASE("single censoring halves the survivor") {
    const auto s = fit({1, 2, 3}, {1, 0, 1});
    REQUIRE(s.breakpoints.size() == 1);
    CHECK(s.breakpoints[0] == 2.0);
    CHECK(s.at(1.999) == 1.0);
    CHECK(s.at(2.0) == 0.5);
    CHECK(s.at(10.0) == 0.5);
    CHECK(s.left_limit(2.0) == 1.0);
    CHECK(cenbar::survivor_left(s, 2.5) == 0.5);
    CHECK(s.left_limit(-1e9) == 1.0);
}

TEST_CASE("tied failure leaves the risk set before the censoring") {
    const auto s = fit({1, 1, 2}, {1, 0, 1});
    REQUIRE(s.breakpoints.size() == 1);
    CHECK(s.at(1.0) == 0.5);
    CHECK(s.left_limit(1.0) == 1.0);
}

TEST_CASE("last observation censored drives the survivor to zero") {
    const auto s = fit({1, 2, 3}, {1, 1, 0});
    CHECK(s.at(3.0) == 0.0);
    CHECK(s.left_limit(3.0) == 1.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fit({}, {}), cenbar::InputError);
    CHECK_THROWS_AS(fit({1, 2}, {1}), cenbar::InputError);
    CHECK_THROWS_AS(fit({1, 2}, {1, 2}), cenbar::InputError);
}

TEST_CASE("matches brute-force product limit on random small datasets") {
    std::mt19937_64 rng(7);
    for (int draw = 0; draw < 500; ++draw) {
        const int n = 1 + static_cast<int>(rng() % 10);
        std::vector<double> t(n);
        std::vector<int> d(n);
        for (int i = 0; i < n; ++i) {
            t[i] = static_cast<double>(static_cast<int>(rng() % 7) - 3);
            d[i] = static_cast<int>(rng() % 2);
        }
        const auto s = fit(t, d);
        std::vector<double> probes = t;
        for (double x : t) {
            probes.push_back(x + 0.5);
            probes.push_back(x - 0.5);
        }
        for (double x : probes) {
            CHECK(s.at(x) == oracle::km_censoring(t, d, x, false));
            CHECK(s.left_limit(x) == oracle::km_censoring(t, d, x, true));
        }
    }
}

TEST_CASE("survivor is non-increasing and within [0, 1]") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    for (int draw = 0; draw < 200; ++draw) {
        const int n = 2 + static_cast<int>(rng() % 40);
        std::vector<double> t(n);
        std::vector<int> d(n);
        for (int i = 0; i < n; ++i) {
            t[i] = z(rng);
            d[i] = static_cast<int>(rng() % 3 != 0);
        }
        const auto s = fit(t, d);
        double prev = 1.0;
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            CHECK(s.values[k] <= prev);
            CHECK(s.values[k] >= 0.0);
            if (k > 0) CHECK(s.breakpoints[k] > s.breakpoints[k - 1]);
            prev = s.values[k];
        }
    }
}
