#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cenbar/dataset.hpp"

namespace cenbar {

/// How the second parameter of the censoring law N(c, 2) is read.
enum class CensoringScale { variance, sd };

struct Scenario {
    int model = 1;
    std::size_t n = 100;
    std::size_t p = 10;
    double rho = 0.5;
    double censoring_rate = 0.2;
    Eigen::VectorXd beta0;
    std::size_t reps = 100;
    std::uint64_t master_seed = 42;
    CensoringScale censoring_scale = CensoringScale::variance;
    std::size_t folds = 5;

    /// Model 1: (3, -2, 0, 0, 6, 0, ...); model 2: (3, -2, 6, 0.3, -0.2, 0.6, 0, ...).
    static Eigen::VectorXd default_beta0(int model, std::size_t p);
    static Scenario defaults(int model, std::size_t n, std::size_t p);

    double censoring_sd() const;
    /// Throws InputError naming the offending field.
    void validate() const;
};

/// splitmix64 of the pair; gives every (seed, stream) its own generator seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Censoring mean c such that P(Y > C) on a 1e5-draw pilot sample matches the
/// target rate within 0.005, by bisection on c with common random numbers.
/// Returns +inf when the target rate is 0.
double calibrate_censoring_mean(const Scenario& scenario);

struct GeneratedData {
    SurvivalDataset data;
    Eigen::VectorXd beta0;
};

/// AR(1) covariates with Corr(x_j, x_k) = rho^|j-k|, N(0,1) errors, N(c, s^2)
/// censoring; T = min(Y, C), delta = I(Y <= C). Bit-identical for a fixed
/// (master_seed, rep_index).
GeneratedData generate(const Scenario& scenario, double censoring_mean, std::size_t rep_index);

struct SelectionRecord {
    double fp = 0.0;
    double fn = 0.0;
    double misc = 0.0;
    double tm = 0.0;
    double sm = 0.0;
    double mspe = 0.0;
    double mab = 0.0;
};

/// Per-replication selection metrics. SM is 1 when both sets are empty and
/// 0 when exactly one is. MAB averages |beta_hat - beta_true| over all p.
SelectionRecord score_selection(const std::vector<std::size_t>& support_hat,
                                const std::vector<std::size_t>& support_true,
                                const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true,
                                double mspe);

enum class Method { cbar, lasso, alasso, scad, mcp };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct SelectionMetrics {
    double misc = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    double tm = 0.0;
    double sm = 0.0;
    double mspe = 0.0;
    double mab = 0.0;
    std::size_t reps = 0;  ///< successful replications
};

struct MethodSummary {
    Method method = Method::cbar;
    SelectionMetrics metrics;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;  ///< first few only
    // diagnostics
    std::size_t fits = 0;
    std::size_t nonconverged = 0;
    std::size_t residual_violations = 0;  ///< cbar: converged fits with residual > tol
    double max_fixed_point_residual = 0.0;
    double max_kkt = 0.0;  ///< comparators
};

struct MonteCarloOptions {
    std::vector<Method> methods = {Method::cbar};
    bool use_screening = false;
    std::optional<std::size_t> k;  ///< screened size; default_k(n) when unset
    unsigned threads = 1;
};

struct MonteCarloReport {
    Scenario scenario;
    MonteCarloOptions options;
    double censoring_mean = 0.0;
    double mean_censored_fraction = 0.0;
    std::size_t k_used = 0;
    std::vector<MethodSummary> methods;
};

/// Fits and scores every method on every replication. A replication that
/// throws for a method counts as a failure for that method and is left out
/// of its means. Results do not depend on the thread count.
MonteCarloReport run_monte_carlo(const Scenario& scenario, const MonteCarloOptions& options);

}  // namespace cenbar
