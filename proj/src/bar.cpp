#include "cenbar/bar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "cenbar/error.hpp"

namespace cenbar {

namespace {

std::vector<Eigen::Index> active_set(const Eigen::VectorXd& beta) {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) {
            idx.push_back(j);
        }
    }
    return idx;
}

void freeze_small(Eigen::VectorXd& beta, double threshold) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (std::abs(beta[j]) < threshold) {
            beta[j] = 0.0;
        }
    }
}

std::string format_penalty(const char* name, double value) {
    std::ostringstream os;
    os.precision(17);
    os << name << " = " << value;
    return os.str();
}

}  // namespace

void FitStats::record(const BarFit& fit, double tol) {
    ++fits;
    if (fit.converged) {
        ++converged;
        max_converged_residual = std::max(max_converged_residual, fit.fixed_point_residual);
        if (fit.fixed_point_residual > tol) {
            ++residual_violations;
        }
    }
}

void FitStats::merge(const FitStats& other) {
    fits += other.fits;
    converged += other.converged;
    residual_violations += other.residual_violations;
    max_converged_residual = std::max(max_converged_residual, other.max_converged_residual);
}

void BarConfig::validate() const {
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        throw InputError("xi must be a finite nonnegative number");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InputError("lambda must be a finite nonnegative number");
    }
    if (!(tol > 0.0)) {
        throw InputError("tol must be positive");
    }
    if (!(zero_threshold > 0.0)) {
        throw InputError("zero_threshold must be positive");
    }
    if (max_iter < 1) {
        throw InputError("max_iter must be at least 1");
    }
}

GramSystem GramSystem::build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) {
        throw InputError("design and response differ in row count");
    }
    GramSystem sys;
    sys.gram = Eigen::MatrixXd::Zero(x.cols(), x.cols());
    sys.gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    sys.gram.triangularView<Eigen::StrictlyUpper>() = sys.gram.transpose();
    sys.xty = x.transpose() * y;
    sys.yty = y.squaredNorm();
    return sys;
}

Eigen::VectorXd ridge_init(const GramSystem& sys, double xi) {
    if (!(xi >= 0.0)) {
        throw InputError("xi must be nonnegative");
    }
    Eigen::MatrixXd m = sys.gram;
    m.diagonal().array() += xi;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("ridge initial solve failed (" + format_penalty("xi", xi) +
                             "): X'X + xi I is not positive definite");
    }
    Eigen::VectorXd beta = llt.solve(sys.xty);
    if (!beta.allFinite()) {
        throw NumericalError("ridge initial solve produced non-finite values (" +
                             format_penalty("xi", xi) + ")");
    }
    return beta;
}

Eigen::VectorXd ridge_init(const StandardizedDesign& design, const SyntheticResponse& ystar,
                           double xi) {
    return ridge_init(GramSystem::build(design.matrix, ystar.centered()), xi);
}

Eigen::VectorXd bar_step(const GramSystem& sys, double lambda, const Eigen::VectorXd& beta_prev) {
    if (beta_prev.size() != sys.dim()) {
        throw InputError("coefficient length does not match design width");
    }
    if (!beta_prev.allFinite()) {
        throw NumericalError("BAR step received non-finite coefficients");
    }
    const auto idx = active_set(beta_prev);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(beta_prev.size());
    if (idx.empty()) {
        return next;
    }
    const Eigen::VectorXd scale = beta_prev(idx);
    Eigen::MatrixXd m = scale.asDiagonal() * sys.gram(idx, idx) * scale.asDiagonal();
    m.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("BAR step solve failed (" + format_penalty("lambda", lambda) + ")");
    }
    const Eigen::VectorXd rhs = scale.cwiseProduct(sys.xty(idx));
    const Eigen::VectorXd sol = scale.cwiseProduct(llt.solve(rhs));
    if (!sol.allFinite()) {
        throw NumericalError("BAR step produced non-finite values (" +
                             format_penalty("lambda", lambda) + ")");
    }
    next(idx) = sol;
    return next;
}

Eigen::VectorXd bar_step(const StandardizedDesign& design, const SyntheticResponse& ystar,
                         double lambda, const Eigen::VectorXd& beta_prev) {
    return bar_step(GramSystem::build(design.matrix, ystar.centered()), lambda, beta_prev);
}

double fixed_point_residual(const GramSystem& sys, double lambda, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd g = bar_step(sys, lambda, beta);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) {
            worst = std::max(worst, std::abs(beta[j] - g[j]));
        }
    }
    return worst;
}

BarFit bar_fit(const GramSystem& sys, const BarConfig& config) {
    config.validate();
    return bar_iterate(sys, config, ridge_init(sys, config.xi));
}

BarFit bar_iterate(const GramSystem& sys, const BarConfig& config, Eigen::VectorXd start) {
    config.validate();
    if (start.size() != sys.dim()) {
        throw InputError("starting vector length does not match design width");
    }
    BarFit fit;
    fit.xi = config.xi;
    fit.lambda = config.lambda;

    Eigen::VectorXd beta = std::move(start);
    freeze_small(beta, config.zero_threshold);

    while (fit.iterations < config.max_iter) {
        if ((beta.array() == 0.0).all()) {
            // null model: g(0) = 0
            fit.converged = true;
            fit.fixed_point_residual = 0.0;
            break;
        }
        Eigen::VectorXd next = bar_step(sys, config.lambda, beta);
        ++fit.iterations;
        freeze_small(next, config.zero_threshold);
        const double change = (next - beta).cwiseAbs().maxCoeff();
        beta = std::move(next);
        if (change < config.tol) {
            const double residual = fixed_point_residual(sys, config.lambda, beta);
            if (residual <= config.tol) {
                fit.converged = true;
                fit.fixed_point_residual = residual;
                break;
            }
        }
    }
    if (!fit.converged) {
        fit.fixed_point_residual = fixed_point_residual(sys, config.lambda, beta);
    }

    fit.beta_std = std::move(beta);
    for (Eigen::Index j = 0; j < fit.beta_std.size(); ++j) {
        if (fit.beta_std[j] != 0.0) {
            fit.support.push_back(static_cast<std::size_t>(j));
        }
    }
    return fit;
}

BarFit bar_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
               const BarConfig& config) {
    BarFit fit = bar_fit(GramSystem::build(design.matrix, ystar.centered()), config);
    auto orig = destandardize_coefficients(fit.beta_std, design, ystar.center);
    fit.beta_orig = std::move(orig.beta);
    fit.intercept = orig.intercept;
    return fit;
}

std::vector<GroupingRow> grouping_bound_report(const BarFit& fit, const StandardizedDesign& design,
                                               const SyntheticResponse& ystar, double lambda) {
    if (!(lambda > 0.0)) {
        throw InputError("grouping bound requires lambda > 0");
    }
    const double ynorm = ystar.centered().norm();
    std::vector<GroupingRow> rows;
    for (std::size_t a = 0; a < fit.support.size(); ++a) {
        for (std::size_t b = a + 1; b < fit.support.size(); ++b) {
            const auto i = static_cast<Eigen::Index>(fit.support[a]);
            const auto j = static_cast<Eigen::Index>(fit.support[b]);
            const double bi = fit.beta_std[i];
            const double bj = fit.beta_std[j];
            if (!(bi * bj > 0.0)) {
                continue;
            }
            const double r = design.matrix.col(i).dot(design.matrix.col(j));
            GroupingRow row;
            row.i = fit.support[a];
            row.j = fit.support[b];
            row.lhs = std::abs(1.0 / bi - 1.0 / bj);
            row.rhs = ynorm * std::sqrt(std::max(0.0, 2.0 * (1.0 - r))) / lambda;
            row.satisfied = row.lhs <= row.rhs + 1e-9;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace cenbar
