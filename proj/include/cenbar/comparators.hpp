#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cenbar/synthetic.hpp"
#include "cenbar/tuning.hpp"

namespace cenbar {

enum class PenaltyKind { lasso, alasso, scad, mcp };

std::string_view to_string(PenaltyKind kind);
std::optional<PenaltyKind> parse_penalty(std::string_view name);

/// Default concavity: 3.7 for SCAD, 3.0 for MCP, unused otherwise.
double default_gamma(PenaltyKind kind);

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::lasso;
    double lambda = 0.0;
    double gamma = 0.0;
    /// Per-coordinate multipliers of lambda; adaptive lasso only. Empty means all ones.
    Eigen::VectorXd weights;

    static PenaltySpec make(PenaltyKind kind, double lambda);
    void validate(Eigen::Index p) const;
    double weight(Eigen::Index j) const { return weights.size() == 0 ? 1.0 : weights[j]; }
};

// Univariate pieces for the objective 0.5 (b - z)^2 + P(|b|).

double soft_threshold(double z, double t);
/// Penalty value P(t) for t >= 0 at unit weight.
double penalty_value(PenaltyKind kind, double t, double lambda, double gamma);
/// P'(t) for t > 0 at unit weight.
double penalty_derivative(PenaltyKind kind, double t, double lambda, double gamma);
/// argmin_b 0.5 (b - z)^2 + w P(|b|) with the closed-form thresholding rule.
double univariate_solution(PenaltyKind kind, double z, double lambda, double gamma, double weight = 1.0);

struct CdResult {
    Eigen::VectorXd beta;
    int sweeps = 0;
    bool converged = false;
};

/// Cyclic coordinate descent on 0.5 ||y*_c - X b||^2 + sum_j P_j(|b_j|).
///
/// Columns of `design` must have unit norm so each update is the univariate
/// rule above. Coordinates are visited in order 0..p-1. Stops once the
/// largest coefficient change in a sweep is below tol and the KKT violation
/// is at most tol; on hitting max_sweeps the last iterate is returned with
/// converged = false.
CdResult coordinate_descent(const StandardizedDesign& design, const SyntheticResponse& ystar,
                            const PenaltySpec& spec, double tol = 1e-7, int max_sweeps = 10000,
                            const Eigen::VectorXd* start = nullptr);

/// Same, on a unit-norm matrix and an already centered response.
CdResult coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                            const PenaltySpec& spec, double tol = 1e-7, int max_sweeps = 10000,
                            const Eigen::VectorXd* start = nullptr);

/// Largest violation of the coordinatewise stationarity conditions at beta.
double kkt_check(const StandardizedDesign& design, const SyntheticResponse& ystar,
                 const PenaltySpec& spec, const Eigen::VectorXd& beta);
double kkt_check(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                 const PenaltySpec& spec, const Eigen::VectorXd& beta);

/// Ten log-spaced lambdas from max_j |x_j'y*_c| / w_j down to ratio times it,
/// returned in increasing order.
std::vector<double> lasso_lambda_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                                      const Eigen::VectorXd& weights, std::size_t points = 10,
                                      double ratio = 1e-3);

/// Adaptive-lasso weights 1 / |ridge(xi)|, with magnitudes floored at 1e-12.
Eigen::VectorXd adaptive_weights(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                                 double xi);

struct ComparatorCvResult {
    /// errors(a, b): held-out MSE at ridge index a (adaptive lasso; one row
    /// otherwise) and lambda index b. +inf marks a failed cell.
    Eigen::MatrixXd errors;
    std::vector<double> xi_values;                 ///< empty unless adaptive lasso
    std::vector<std::vector<double>> lambda_paths;  ///< one increasing path per row
    std::size_t best_row = 0;
    std::size_t best_col = 0;
    double best_lambda = 0.0;
    double best_xi = 0.0;
    double best_error = 0.0;
    std::vector<std::vector<std::size_t>> folds;
    double max_kkt = 0.0;  ///< over every fit made during CV and the final fit
    std::size_t fits = 0;
    std::size_t nonconverged = 0;
};

struct ComparatorFit {
    PenaltySpec spec;
    Eigen::VectorXd beta_std;
    Eigen::VectorXd beta_orig;
    double intercept = 0.0;
    std::vector<std::size_t> support;
    bool converged = false;
    double kkt = 0.0;
    ComparatorCvResult cv;
};

struct ComparatorOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    double tol = 1e-7;
    int max_sweeps = 10000;
    /// Ridge path for adaptive-lasso weights; usually the BAR xi grid.
    std::vector<double> xi_values;
};

/// K-fold CV over the lambda path (and the ridge path for adaptive lasso),
/// then a refit on all rows at the selected cell. Paths run from the largest
/// lambda down with warm starts. Fold assignment matches cross_validate for
/// the same seed.
ComparatorFit tune_and_fit_comparator(const StandardizedDesign& design,
                                      const SyntheticResponse& ystar, PenaltyKind kind,
                                      const ComparatorOptions& options);

}  // namespace cenbar
