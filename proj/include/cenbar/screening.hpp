#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cenbar/bar.hpp"
#include "cenbar/dataset.hpp"
#include "cenbar/synthetic.hpp"
#include "cenbar/tuning.hpp"

namespace cenbar {

/// Screened model size 2 ln(n) n^(1/4), rounded to the nearest integer
/// (43 at n = 240, 34 at n = 136). Requires n >= 2.
std::size_t default_k(std::size_t n);

struct ScreenResult {
    std::vector<std::size_t> kept;  ///< by decreasing score, ties to the lower index
    Eigen::VectorXd scores;
    std::size_t k = 0;
};

/// Dimension-reduction step in front of a p >> n fit.
class Screener {
public:
    virtual ~Screener() = default;
    virtual ScreenResult screen(const StandardizedDesign& design, const SyntheticResponse& ystar,
                                std::size_t k) const = 0;
};

/// score_j = |x_j' y*_c|; keeps the k largest.
class MarginalScreener final : public Screener {
public:
    ScreenResult screen(const StandardizedDesign& design, const SyntheticResponse& ystar,
                        std::size_t k) const override;
};

ScreenResult marginal_screen(const StandardizedDesign& design, const SyntheticResponse& ystar,
                             std::size_t k);

/// Columns `kept` (in increasing index order) of an already standardized design.
StandardizedDesign restrict_columns(const StandardizedDesign& design,
                                    const std::vector<std::size_t>& kept);

struct TwoStepFit {
    BarFit fit;  ///< length p, exact zeros off the kept set
    ScreenResult screen;
    CvResult cv;
};

/// Screen to k columns, tune and fit BAR on the reduced design, then embed
/// the coefficients back into length p. With k >= p screening is skipped. A
/// response orthogonal to every kept column returns the null model untuned.
TwoStepFit two_step_fit(const StandardizedDesign& design, const SyntheticResponse& ystar,
                        std::size_t k, const CvOptions& options,
                        const Screener& screener = MarginalScreener{});

/// Convenience overload: standardizes, builds Y*, and uses seed `cv_seed`.
TwoStepFit two_step_fit(const SurvivalDataset& data, std::size_t k, std::uint64_t cv_seed);

}  // namespace cenbar
