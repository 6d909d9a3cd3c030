#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "cenbar/synthetic.hpp"

namespace cenbar {

struct BarConfig {
    double xi = 0.0;      ///< ridge penalty of the initial estimate
    double lambda = 0.0;  ///< reweighted-ridge penalty
    double tol = 1e-8;
    int max_iter = 1000;
    double zero_threshold = 1e-8;

    void validate() const;
};

/// Sufficient statistics X'X, X'y of a least-squares problem. Every BAR
/// solve works from these, so one system serves a whole tuning grid.
struct GramSystem {
    Eigen::MatrixXd gram;
    Eigen::VectorXd xty;
    double yty = 0.0;

    static GramSystem build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
    Eigen::Index dim() const { return xty.size(); }
};

struct BarFit {
    Eigen::VectorXd beta_std;
    Eigen::VectorXd beta_orig;
    double intercept = 0.0;
    std::vector<std::size_t> support;
    int iterations = 0;
    bool converged = false;
    double fixed_point_residual = 0.0;
    double xi = 0.0;
    double lambda = 0.0;
};

/// Running tally of fit diagnostics across many fits (CV cells, replications).
struct FitStats {
    std::size_t fits = 0;
    std::size_t converged = 0;
    std::size_t residual_violations = 0;  ///< converged fits with residual > tol
    double max_converged_residual = 0.0;

    void record(const BarFit& fit, double tol);
    void merge(const FitStats& other);
};

/// (X'X + xi I)^{-1} X'y via a Cholesky solve. With xi = 0 and a singular
/// Gram matrix the solve fails with NumericalError.
Eigen::VectorXd ridge_init(const GramSystem& sys, double xi);
Eigen::VectorXd ridge_init(const StandardizedDesign& design, const SyntheticResponse& ystar, double xi);

/// One application of the BAR map g.
///
/// Coordinates that are zero in `beta_prev` stay zero. On the active set A the
/// update solves (G_AA + lambda diag(1/beta_A^2)) b = (X'y)_A in the scaled
/// form b = Gamma (Gamma G_AA Gamma + lambda I)^{-1} Gamma (X'y)_A with
/// Gamma = diag(beta_A), so no coefficient is ever divided by.
Eigen::VectorXd bar_step(const GramSystem& sys, double lambda, const Eigen::VectorXd& beta_prev);
Eigen::VectorXd bar_step(const StandardizedDesign& design, const SyntheticResponse& ystar,
                         double lambda, const Eigen::VectorXd& beta_prev);

/// Ridge start followed by BAR iterations to the fixed point.
///
/// After every step coordinates with |beta_j| < zero_threshold are set to 0
/// for good. Iteration stops once the sup-norm change falls below tol and one
/// further application of g moves the active coordinates by at most tol.
/// Only beta_std and the diagnostics are filled; beta_orig and intercept are
/// left for the caller, which knows the scaling.
BarFit bar_fit(const GramSystem& sys, const BarConfig& config);

/// bar_fit with a precomputed starting vector in place of ridge_init(sys, config.xi).
BarFit bar_iterate(const GramSystem& sys, const BarConfig& config, Eigen::VectorXd start);

/// Same, on a standardized design; ystar is centered internally and
/// beta_orig/intercept are filled in.
BarFit bar_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
               const BarConfig& config);

/// sup over the active set of |beta - g(beta)|.
double fixed_point_residual(const GramSystem& sys, double lambda, const Eigen::VectorXd& beta);

struct GroupingRow {
    std::size_t i = 0;
    std::size_t j = 0;
    double lhs = 0.0;  ///< |1/beta_i - 1/beta_j|
    double rhs = 0.0;  ///< ||y*|| sqrt(2 (1 - r_ij)) / lambda
    bool satisfied = false;
};

/// Evaluates the grouping inequality for every same-sign pair in the support.
/// A pair passes when lhs <= rhs + 1e-9. Throws InputError if lambda <= 0.
std::vector<GroupingRow> grouping_bound_report(const BarFit& fit, const StandardizedDesign& design,
                                               const SyntheticResponse& ystar, double lambda);

}  // namespace cenbar
