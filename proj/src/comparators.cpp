#include "cenbar/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cenbar/bar.hpp"
#include "cenbar/error.hpp"

namespace cenbar {

std::string_view to_string(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::lasso: return "lasso";
        case PenaltyKind::alasso: return "alasso";
        case PenaltyKind::scad: return "scad";
        case PenaltyKind::mcp: return "mcp";
    }
    return "unknown";
}

std::optional<PenaltyKind> parse_penalty(std::string_view name) {
    if (name == "lasso") return PenaltyKind::lasso;
    if (name == "alasso") return PenaltyKind::alasso;
    if (name == "scad") return PenaltyKind::scad;
    if (name == "mcp") return PenaltyKind::mcp;
    return std::nullopt;
}

double default_gamma(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::scad: return 3.7;
        case PenaltyKind::mcp: return 3.0;
        default: return 0.0;
    }
}

PenaltySpec PenaltySpec::make(PenaltyKind kind, double lambda) {
    PenaltySpec spec;
    spec.kind = kind;
    spec.lambda = lambda;
    spec.gamma = default_gamma(kind);
    return spec;
}

void PenaltySpec::validate(Eigen::Index p) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InputError("penalty lambda must be a finite nonnegative number");
    }
    if (kind == PenaltyKind::scad && !(gamma > 2.0)) {
        throw InputError("SCAD requires gamma > 2, got " + std::to_string(gamma));
    }
    if (kind == PenaltyKind::mcp && !(gamma > 1.0)) {
        throw InputError("MCP requires gamma > 1, got " + std::to_string(gamma));
    }
    if (weights.size() != 0) {
        if (weights.size() != p) {
            throw InputError("penalty weight count does not match design width");
        }
        if (!(weights.array() > 0.0).all() || !weights.allFinite()) {
            throw InputError("penalty weights must be positive and finite");
        }
    }
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

double penalty_value(PenaltyKind kind, double t, double lambda, double gamma) {
    switch (kind) {
        case PenaltyKind::lasso:
        case PenaltyKind::alasso:
            return lambda * t;
        case PenaltyKind::mcp:
            return t <= gamma * lambda ? lambda * t - t * t / (2.0 * gamma)
                                       : 0.5 * gamma * lambda * lambda;
        case PenaltyKind::scad:
            if (t <= lambda) return lambda * t;
            if (t <= gamma * lambda) {
                return (2.0 * gamma * lambda * t - t * t - lambda * lambda) / (2.0 * (gamma - 1.0));
            }
            return 0.5 * lambda * lambda * (gamma + 1.0);
    }
    return 0.0;
}

double penalty_derivative(PenaltyKind kind, double t, double lambda, double gamma) {
    switch (kind) {
        case PenaltyKind::lasso:
        case PenaltyKind::alasso:
            return lambda;
        case PenaltyKind::mcp:
            return std::max(0.0, lambda - t / gamma);
        case PenaltyKind::scad:
            if (t <= lambda) return lambda;
            if (t <= gamma * lambda) return (gamma * lambda - t) / (gamma - 1.0);
            return 0.0;
    }
    return 0.0;
}

double univariate_solution(PenaltyKind kind, double z, double lambda, double gamma, double weight) {
    const double az = std::abs(z);
    switch (kind) {
        case PenaltyKind::lasso:
        case PenaltyKind::alasso:
            return soft_threshold(z, lambda * weight);
        case PenaltyKind::mcp:
            if (az <= gamma * lambda) {
                return soft_threshold(z, lambda) / (1.0 - 1.0 / gamma);
            }
            return z;
        case PenaltyKind::scad:
            if (az <= 2.0 * lambda) {
                return soft_threshold(z, lambda);
            }
            if (az <= gamma * lambda) {
                return soft_threshold(z, gamma * lambda / (gamma - 1.0)) / (1.0 - 1.0 / (gamma - 1.0));
            }
            return z;
    }
    return 0.0;
}

namespace {

// Worst stationarity violation given the current residual y - X beta.
double kkt_from_residual(const Eigen::MatrixXd& x, const Eigen::VectorXd& r,
                         const PenaltySpec& spec, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd grad = x.transpose() * r;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double w = spec.weight(j);
        const double g = grad[j];
        double v = 0.0;
        if (beta[j] == 0.0) {
            // subdifferential of every penalty here at 0 is [-lambda w, lambda w]
            v = std::max(0.0, std::abs(g) - spec.lambda * w);
        } else {
            const double t = std::abs(beta[j]);
            const double s = beta[j] > 0.0 ? 1.0 : -1.0;
            v = std::abs(g - w * penalty_derivative(spec.kind, t, spec.lambda, spec.gamma) * s);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

CdResult coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                            const PenaltySpec& spec, double tol, int max_sweeps,
                            const Eigen::VectorXd* start) {
    spec.validate(x.cols());
    if (x.rows() != y_centered.size()) {
        throw InputError("design and response differ in row count");
    }
    const Eigen::Index p = x.cols();
    CdResult out;
    out.beta = start != nullptr ? *start : Eigen::VectorXd::Zero(p);
    if (out.beta.size() != p) {
        throw InputError("starting vector length does not match design width");
    }
    Eigen::VectorXd r = y_centered - x * out.beta;

    while (out.sweeps < max_sweeps) {
        ++out.sweeps;
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double old = out.beta[j];
            const double z = x.col(j).dot(r) + old;
            const double nb = univariate_solution(spec.kind, z, spec.lambda, spec.gamma, spec.weight(j));
            if (nb != old) {
                r.noalias() -= (nb - old) * x.col(j);
                out.beta[j] = nb;
                max_change = std::max(max_change, std::abs(nb - old));
            }
        }
        // small steps alone can hide a slowly drifting gradient, so confirm
        // stationarity before stopping
        if (max_change < tol && kkt_from_residual(x, r, spec, out.beta) <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

CdResult coordinate_descent(const StandardizedDesign& design, const SyntheticResponse& ystar,
                            const PenaltySpec& spec, double tol, int max_sweeps,
                            const Eigen::VectorXd* start) {
    return coordinate_descent(design.matrix, ystar.centered(), spec, tol, max_sweeps, start);
}

double kkt_check(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                 const PenaltySpec& spec, const Eigen::VectorXd& beta) {
    return kkt_from_residual(x, y_centered - x * beta, spec, beta);
}

double kkt_check(const StandardizedDesign& design, const SyntheticResponse& ystar,
                 const PenaltySpec& spec, const Eigen::VectorXd& beta) {
    return kkt_check(design.matrix, ystar.centered(), spec, beta);
}

std::vector<double> lasso_lambda_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                                      const Eigen::VectorXd& weights, std::size_t points,
                                      double ratio) {
    Eigen::ArrayXd score = (x.transpose() * y_centered).array().abs();
    if (weights.size() != 0) {
        score /= weights.array();
    }
    const double top = score.size() == 0 ? 0.0 : score.maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top)) {
        throw DegenerateError("response is orthogonal to every column; lambda path is empty");
    }
    return log_spaced(top * ratio, top, points);
}

Eigen::VectorXd adaptive_weights(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_centered,
                                 double xi) {
    const Eigen::VectorXd ridge = ridge_init(GramSystem::build(x, y_centered), xi);
    return ridge.cwiseAbs().cwiseMax(1e-12).cwiseInverse();
}

namespace {

struct PathPoint {
    CdResult cd;
    double kkt = 0.0;
};

/// Fits lambdas[top..stop] from the largest down with warm starts.
std::vector<PathPoint> fit_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& yc,
                                PenaltySpec spec, const std::vector<double>& lambdas,
                                std::size_t stop, const ComparatorOptions& options) {
    std::vector<PathPoint> out(lambdas.size());
    Eigen::VectorXd start = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t b = lambdas.size(); b-- > stop;) {
        spec.lambda = lambdas[b];
        out[b].cd = coordinate_descent(x, yc, spec, options.tol, options.max_sweeps, &start);
        out[b].kkt = kkt_check(x, yc, spec, out[b].cd.beta);
        start = out[b].cd.beta;
    }
    return out;
}

}  // namespace

ComparatorFit tune_and_fit_comparator(const StandardizedDesign& design,
                                      const SyntheticResponse& ystar, PenaltyKind kind,
                                      const ComparatorOptions& options) {
    const auto n = static_cast<std::size_t>(design.rows());
    if (static_cast<std::size_t>(ystar.values.size()) != n) {
        throw InputError("design and response differ in row count");
    }
    const bool adaptive = kind == PenaltyKind::alasso;
    if (adaptive && options.xi_values.empty()) {
        throw InputError("adaptive lasso needs a ridge (xi) path for its weights");
    }

    const Eigen::VectorXd yc = ystar.centered();
    ComparatorCvResult cv;
    cv.folds = kfold_split(n, options.folds, options.seed);
    if (adaptive) {
        cv.xi_values = options.xi_values;
    }
    const std::size_t rows = adaptive ? cv.xi_values.size() : 1;

    std::vector<Eigen::VectorXd> full_weights(rows);
    for (std::size_t a = 0; a < rows; ++a) {
        if (adaptive) {
            full_weights[a] = adaptive_weights(design.matrix, yc, cv.xi_values[a]);
        }
        cv.lambda_paths.push_back(lasso_lambda_grid(design.matrix, yc, full_weights[a]));
    }
    const auto cols = static_cast<Eigen::Index>(cv.lambda_paths.front().size());
    cv.errors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), cols);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> failed =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            static_cast<Eigen::Index>(rows), cols, false);
    const double fold_weight = 1.0 / static_cast<double>(cv.folds.size());

    std::vector<char> in_test(n);
    for (const auto& test : cv.folds) {
        std::fill(in_test.begin(), in_test.end(), 0);
        for (auto i : test) {
            in_test[i] = 1;
        }
        std::vector<Eigen::Index> train_rows;
        std::vector<Eigen::Index> test_rows;
        for (std::size_t i = 0; i < n; ++i) {
            (in_test[i] ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
        }
        const Eigen::MatrixXd x_test = design.matrix(test_rows, Eigen::all);
        const Eigen::VectorXd y_test = ystar.values(test_rows);
        const Eigen::VectorXd y_train = ystar.values(train_rows);

        StandardizedDesign train_design;
        try {
            train_design = standardize(design.matrix(train_rows, Eigen::all));
        } catch (const DegenerateError&) {
            failed.setConstant(true);
            continue;
        }
        const double y_mean = y_train.mean();
        const Eigen::VectorXd y_train_c = (y_train.array() - y_mean).matrix();

        for (std::size_t a = 0; a < rows; ++a) {
            const auto row = static_cast<Eigen::Index>(a);
            PenaltySpec spec = PenaltySpec::make(kind, 0.0);
            try {
                if (adaptive) {
                    spec.weights = adaptive_weights(train_design.matrix, y_train_c, cv.xi_values[a]);
                }
                const auto path =
                    fit_path(train_design.matrix, y_train_c, spec, cv.lambda_paths[a], 0, options);
                for (Eigen::Index b = 0; b < cols; ++b) {
                    const auto& pt = path[static_cast<std::size_t>(b)];
                    ++cv.fits;
                    cv.nonconverged += pt.cd.converged ? 0 : 1;
                    cv.max_kkt = std::max(cv.max_kkt, pt.kkt);
                    const auto orig = destandardize_coefficients(pt.cd.beta, train_design, y_mean);
                    const Eigen::VectorXd resid =
                        y_test - ((x_test * orig.beta).array() + orig.intercept).matrix();
                    cv.errors(row, b) +=
                        fold_weight * resid.squaredNorm() / static_cast<double>(test_rows.size());
                }
            } catch (const NumericalError&) {
                failed.row(row).setConstant(true);
            }
        }
    }
    for (Eigen::Index a = 0; a < cv.errors.rows(); ++a) {
        for (Eigen::Index b = 0; b < cols; ++b) {
            if (failed(a, b) || !std::isfinite(cv.errors(a, b))) {
                cv.errors(a, b) = std::numeric_limits<double>::infinity();
            }
        }
    }
    select_best_cell(cv.errors, cv.best_row, cv.best_col);
    cv.best_error = cv.errors(static_cast<Eigen::Index>(cv.best_row),
                              static_cast<Eigen::Index>(cv.best_col));
    if (!std::isfinite(cv.best_error)) {
        throw NumericalError("every cross-validation cell failed for " +
                             std::string(to_string(kind)));
    }
    cv.best_lambda = cv.lambda_paths[cv.best_row][cv.best_col];
    cv.best_xi = adaptive ? cv.xi_values[cv.best_row] : 0.0;

    ComparatorFit out;
    out.spec = PenaltySpec::make(kind, cv.best_lambda);
    if (adaptive) {
        out.spec.weights = full_weights[cv.best_row];
    }
    const auto path = fit_path(design.matrix, yc, out.spec, cv.lambda_paths[cv.best_row],
                               cv.best_col, options);
    const auto& chosen = path[cv.best_col];
    out.beta_std = chosen.cd.beta;
    out.converged = chosen.cd.converged;
    out.kkt = chosen.kkt;
    ++cv.fits;
    cv.nonconverged += chosen.cd.converged ? 0 : 1;
    cv.max_kkt = std::max(cv.max_kkt, chosen.kkt);
    const auto orig = destandardize_coefficients(out.beta_std, design, ystar.center);
    out.beta_orig = orig.beta;
    out.intercept = orig.intercept;
    for (Eigen::Index j = 0; j < out.beta_std.size(); ++j) {
        if (out.beta_std[j] != 0.0) {
            out.support.push_back(static_cast<std::size_t>(j));
        }
    }
    out.cv = std::move(cv);
    return out;
}

}  // namespace cenbar
