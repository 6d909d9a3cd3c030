#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "cenbar/dataset.hpp"
#include "cenbar/error.hpp"
#include "cenbar/km.hpp"

namespace cenbar {

/// Leurgans synthetic response Y* together with its sample mean.
struct SyntheticResponse {
    Eigen::VectorXd values;
    double center = 0.0;

    Eigen::VectorXd centered() const { return values.array() - center; }
};

/// Columns centered to mean zero and scaled to unit Euclidean norm.
struct StandardizedDesign {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd col_means;
    Eigen::VectorXd col_norms;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index cols() const { return matrix.cols(); }
};

/// Thrown by standardize(); `column` is zero-based.
class ConstantColumnError : public DegenerateError {
public:
    ConstantColumnError(std::size_t column, const std::string& what)
        : DegenerateError(what), column(column) {}
    std::size_t column;
};

/// Y*_i = integral over (-inf, max T] of I(T_i >= s) / (1 - H(s-)) - I(s < 0) ds.
///
/// The integrand is piecewise constant between consecutive points of
/// {observed times} U {0} U {survivor breakpoints}, so the integral is a
/// finite sum. It is evaluated as T_i plus the sum of len * (1/S - 1) over the
/// intervals lying below T_i, which makes the uncensored case exact.
///
/// Throws NumericalError if S(s-) is zero on a nonempty interval.
SyntheticResponse leurgans_transform(std::span<const double> times, const StepSurvivor& survivor);
SyntheticResponse leurgans_transform(const SurvivalDataset& data, const StepSurvivor& survivor);

/// Fits the censoring survivor on `data` and transforms it.
SyntheticResponse leurgans_transform(const SurvivalDataset& data);

/// Throws ConstantColumnError when a column's centered norm is below 1e-12.
StandardizedDesign standardize(const Eigen::MatrixXd& x);

struct OriginalScaleCoefficients {
    Eigen::VectorXd beta;
    double intercept = 0.0;
};

/// Maps standardized-scale coefficients back to raw covariates:
/// beta_j / norm_j, with the intercept absorbing the column means.
OriginalScaleCoefficients destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                                     const StandardizedDesign& design,
                                                     double response_center);

}  // namespace cenbar
