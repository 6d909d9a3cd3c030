#include "cenbar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <json.hpp>

#include "cenbar/error.hpp"
#include "cenbar/synthetic.hpp"

namespace cenbar {

FitOutcome fit_dataset(const SurvivalDataset& data, const FitOptions& options) {
    data.validate();
    if (options.xi.has_value() != options.lambda.has_value()) {
        throw InputError("xi and lambda must be fixed together");
    }
    FitOutcome out;
    out.n = data.rows();
    out.censored_fraction = data.censored_fraction();
    out.names = data.covariate_names;
    const std::size_t p = data.cols();
    if (out.names.size() != p) {
        out.names.clear();
        for (std::size_t j = 0; j < p; ++j) {
            out.names.push_back("x" + std::to_string(j + 1));
        }
    }

    StandardizedDesign design;
    try {
        design = standardize(data.covariates);
    } catch (const ConstantColumnError& e) {
        throw DegenerateError("column '" + out.names[e.column] +
                              "' is constant (zero variance after centering)");
    }
    const SyntheticResponse ystar = leurgans_transform(data);

    std::vector<std::size_t> cols(p);
    for (std::size_t j = 0; j < p; ++j) {
        cols[j] = j;
    }
    const StandardizedDesign* working = &design;
    StandardizedDesign reduced;
    if (options.screen_k.has_value()) {
        const std::size_t k = std::min(*options.screen_k == 0 ? default_k(data.rows()) : *options.screen_k, p);
        out.screen = marginal_screen(design, ystar, k);
        cols = out.screen->kept;
        std::sort(cols.begin(), cols.end());
        reduced = restrict_columns(design, cols);
        working = &reduced;
    }

    BarFit fit;
    if (options.xi.has_value()) {
        BarConfig config = options.base;
        config.xi = *options.xi;
        config.lambda = *options.lambda;
        fit = bar_fit(*working, ystar, config);
    } else {
        CvOptions cv;
        cv.folds = options.folds;
        cv.seed = options.seed;
        cv.base = options.base;
        cv.per_fold_transform = options.per_fold_transform;
        const CensoredOutcome outcome{std::span<const double>(data.times.data(), data.rows()),
                                      std::span<const int>(data.events)};
        cv.outcome = &outcome;
        auto tuned = tune_and_fit(*working, ystar, cv);
        fit = std::move(tuned.fit);
        out.cv = std::move(tuned.cv);
    }

    out.fit = fit;
    out.fit.beta_std = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    out.fit.beta_orig = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    out.fit.support.clear();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto src = static_cast<Eigen::Index>(c);
        const auto dst = static_cast<Eigen::Index>(cols[c]);
        out.fit.beta_std[dst] = fit.beta_std[src];
        out.fit.beta_orig[dst] = fit.beta_orig[src];
        if (fit.beta_std[src] != 0.0) {
            out.fit.support.push_back(cols[c]);
        }
    }
    return out;
}

std::string fit_report_json(const FitOutcome& outcome) {
    using nlohmann::ordered_json;
    const BarFit& fit = outcome.fit;
    ordered_json doc;
    doc["schema"] = "cenbar-fit/1";
    doc["n"] = outcome.n;
    doc["p"] = outcome.names.size();
    doc["censored_fraction"] = outcome.censored_fraction;
    ordered_json support = ordered_json::array();
    for (auto j : fit.support) {
        support.push_back(outcome.names[j]);
    }
    doc["support"] = support;
    ordered_json coefs = ordered_json::object();
    for (std::size_t j = 0; j < outcome.names.size(); ++j) {
        coefs[outcome.names[j]] = fit.beta_orig[static_cast<Eigen::Index>(j)];
    }
    doc["beta_orig"] = coefs;
    doc["intercept"] = fit.intercept;
    doc["xi"] = fit.xi;
    doc["lambda"] = fit.lambda;
    if (outcome.cv) {
        doc["cv_error"] = std::isfinite(outcome.cv->best_error) ? ordered_json(outcome.cv->best_error)
                                                                : ordered_json(nullptr);
        doc["folds"] = outcome.cv->folds.size();
        doc["seed"] = outcome.cv->seed;
    } else {
        doc["cv_error"] = nullptr;
    }
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    doc["fixed_point_residual"] = fit.fixed_point_residual;
    if (outcome.screen) {
        ordered_json kept = ordered_json::array();
        for (auto j : outcome.screen->kept) {
            kept.push_back(outcome.names[j]);
        }
        doc["screening"] = {{"k", outcome.screen->k}, {"kept", kept}};
    } else {
        doc["screening"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

}  // namespace cenbar
