#include "cenbar/cenbar.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cenbar/error.hpp"
#include "cenbar/io.hpp"
#include "cenbar/pipeline.hpp"
#include "cenbar/simulate.hpp"
#include "cenbar/synthetic.hpp"

struct cenbar_dataset {
    cenbar::SurvivalDataset data;
    std::optional<cenbar::io::CsvText> text;
};

struct cenbar_fit {
    cenbar::FitOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

cenbar_status fail(cenbar_status code, std::string message) {
    g_last_error = std::move(message);
    return code;
}

// Maps the core's exception hierarchy onto status codes.
template <class F>
cenbar_status guarded(F&& body) {
    g_last_error.clear();
    try {
        body();
        return CENBAR_OK;
    } catch (const cenbar::InputError& e) {
        return fail(CENBAR_ERROR_INPUT, e.what());
    } catch (const cenbar::DegenerateError& e) {
        return fail(CENBAR_ERROR_DEGENERATE, e.what());
    } catch (const cenbar::NumericalError& e) {
        return fail(CENBAR_ERROR_NUMERICAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CENBAR_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CENBAR_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(CENBAR_ERROR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

struct IoFailure {
    std::string message;
};

std::string read_file(const char* path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure{std::string("cannot open '") + path + "'"};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoFailure{std::string("cannot read '") + path + "'"};
    }
    return buf.str();
}

std::vector<cenbar::Method> parse_method_list(const std::string& list) {
    std::vector<cenbar::Method> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t end = list.find(',', start);
        if (end == std::string::npos) {
            end = list.size();
        }
        std::string name = list.substr(start, end - start);
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        while (!name.empty() && name.back() == ' ') name.pop_back();
        if (!name.empty()) {
            auto m = cenbar::parse_method(name);
            if (!m) {
                std::string valid;
                for (auto v : cenbar::all_methods()) {
                    if (!valid.empty()) valid += ", ";
                    valid += cenbar::to_string(v);
                }
                throw cenbar::InputError("unknown method '" + name + "' (valid: " + valid + ")");
            }
            bool seen = false;
            for (auto x : out) seen = seen || x == *m;
            if (!seen) out.push_back(*m);
        }
        start = end + 1;
    }
    if (out.empty()) {
        throw cenbar::InputError("method list is empty");
    }
    return out;
}

struct ResolvedRun {
    cenbar::Scenario scenario;
    cenbar::MonteCarloOptions options;
};

ResolvedRun resolve_run(const char* scenario_json, const cenbar_run_options* run) {
    cenbar_run_options defaults;
    cenbar_run_options_init(&defaults);
    if (run == nullptr) {
        run = &defaults;
    }
    cenbar::io::ScenarioExtras extras;
    ResolvedRun r;
    r.scenario = cenbar::io::scenario_from_json(scenario_json, &extras);
    if (run->reps > 0) {
        r.scenario.reps = static_cast<std::size_t>(run->reps);
    } else if (run->reps < 0) {
        throw cenbar::InputError("reps must be positive");
    }
    if (run->seed_set != 0) {
        r.scenario.master_seed = run->seed;
    }
    if (run->methods != nullptr) {
        r.options.methods = parse_method_list(run->methods);
    } else if (extras.methods) {
        r.options.methods = *extras.methods;
    } else if (run->default_methods != nullptr) {
        r.options.methods = parse_method_list(run->default_methods);
    }
    if (run->screen >= 0) {
        r.options.use_screening = run->screen != 0;
    } else if (extras.screen) {
        r.options.use_screening = *extras.screen;
    }
    if (run->k > 0) {
        r.options.k = static_cast<std::size_t>(run->k);
    } else if (run->k < 0) {
        throw cenbar::InputError("k must be positive");
    } else if (extras.k) {
        r.options.k = extras.k;
    }
    if (r.options.k && !r.options.use_screening) {
        r.options.use_screening = true;
    }
    unsigned threads = run->threads;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    r.options.threads = threads;
    r.scenario.validate();
    return r;
}

}  // namespace

extern "C" {

const char* cenbar_version(void) { return "1.0.0"; }

const char* cenbar_last_error(void) { return g_last_error.c_str(); }

void cenbar_string_free(char* s) { std::free(s); }

cenbar_status cenbar_dataset_read_csv(const char* path, cenbar_dataset** out) {
    if (path == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoFailure& e) {
        return fail(CENBAR_ERROR_IO, e.message);
    }
    return cenbar_dataset_parse_csv(text.data(), text.size(), out);
}

cenbar_status cenbar_dataset_parse_csv(const char* text, size_t length, cenbar_dataset** out) {
    if (text == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] {
        auto ds = std::make_unique<cenbar_dataset>();
        ds->text.emplace();
        ds->data = cenbar::io::read_dataset_csv(std::string_view(text, length), &*ds->text);
        *out = ds.release();
    });
}

cenbar_status cenbar_dataset_create(size_t n, size_t p, const double* times, const int* events,
                                    const double* covariates, cenbar_dataset** out) {
    if (out == nullptr || (n > 0 && (times == nullptr || events == nullptr)) ||
        (n > 0 && p > 0 && covariates == nullptr)) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] {
        Eigen::VectorXd t(static_cast<Eigen::Index>(n));
        std::vector<int> d(events, events + n);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        for (size_t i = 0; i < n; ++i) {
            t[static_cast<Eigen::Index>(i)] = times[i];
            for (size_t j = 0; j < p; ++j) {
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = covariates[i * p + j];
            }
        }
        auto ds = std::make_unique<cenbar_dataset>();
        ds->data = cenbar::make_dataset(std::move(t), std::move(d), std::move(x));
        *out = ds.release();
    });
}

void cenbar_dataset_free(cenbar_dataset* ds) { delete ds; }

size_t cenbar_dataset_rows(const cenbar_dataset* ds) { return ds ? ds->data.rows() : 0; }

size_t cenbar_dataset_cols(const cenbar_dataset* ds) { return ds ? ds->data.cols() : 0; }

cenbar_status cenbar_dataset_to_csv(const cenbar_dataset* ds, char** out) {
    if (ds == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = dup_string(cenbar::io::dataset_to_csv(ds->data)); });
}

cenbar_status cenbar_synthetic_response(const cenbar_dataset* ds, double* out, size_t capacity) {
    if (ds == nullptr || (out == nullptr && ds->data.rows() > 0)) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    if (capacity < ds->data.rows()) {
        return fail(CENBAR_ERROR_ARGUMENT, "output buffer holds " + std::to_string(capacity) +
                                               " values, need " + std::to_string(ds->data.rows()));
    }
    return guarded([&] {
        const auto y = cenbar::leurgans_transform(ds->data);
        for (Eigen::Index i = 0; i < y.values.size(); ++i) {
            out[i] = y.values[i];
        }
    });
}

cenbar_status cenbar_transform_csv(const cenbar_dataset* ds, char** out) {
    if (ds == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] {
        const auto y = cenbar::leurgans_transform(ds->data);
        cenbar::io::CsvText text;
        if (ds->text) {
            text = *ds->text;
        } else {
            const std::string csv = cenbar::io::dataset_to_csv(ds->data);
            std::istringstream lines(csv);
            std::string line;
            std::getline(lines, text.header);
            while (std::getline(lines, line)) {
                text.rows.push_back(line);
            }
        }
        *out = dup_string(cenbar::io::append_column_csv(text, "ystar", y.values));
    });
}

void cenbar_fit_options_init(cenbar_fit_options* options) {
    if (options == nullptr) {
        return;
    }
    const cenbar::BarConfig base;
    options->folds = 5;
    options->seed = 42;
    options->fixed_tuning = 0;
    options->xi = 0.0;
    options->lambda = 0.0;
    options->screen_k = -1;
    options->tol = base.tol;
    options->max_iter = static_cast<int32_t>(base.max_iter);
    options->zero_threshold = base.zero_threshold;
    options->per_fold_transform = 0;
}

cenbar_status cenbar_fit_run(const cenbar_dataset* ds, const cenbar_fit_options* options,
                             cenbar_fit** out) {
    if (ds == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    cenbar_fit_options defaults;
    cenbar_fit_options_init(&defaults);
    if (options == nullptr) {
        options = &defaults;
    }
    return guarded([&] {
        if (options->folds < 2) {
            throw cenbar::InputError("folds must be at least 2");
        }
        if (options->max_iter < 1) {
            throw cenbar::InputError("max_iter must be positive");
        }
        cenbar::FitOptions fo;
        fo.folds = static_cast<std::size_t>(options->folds);
        fo.seed = options->seed;
        if (options->fixed_tuning != 0) {
            fo.xi = options->xi;
            fo.lambda = options->lambda;
        }
        if (options->screen_k >= 0) {
            fo.screen_k = static_cast<std::size_t>(options->screen_k);
        }
        fo.per_fold_transform = options->per_fold_transform != 0;
        fo.base.tol = options->tol;
        fo.base.max_iter = static_cast<std::size_t>(options->max_iter);
        fo.base.zero_threshold = options->zero_threshold;
        auto fit = std::make_unique<cenbar_fit>();
        fit->outcome = cenbar::fit_dataset(ds->data, fo);
        *out = fit.release();
    });
}

void cenbar_fit_free(cenbar_fit* fit) { delete fit; }

size_t cenbar_fit_num_coefficients(const cenbar_fit* fit) {
    return fit ? static_cast<size_t>(fit->outcome.fit.beta_orig.size()) : 0;
}

cenbar_status cenbar_fit_coefficients(const cenbar_fit* fit, double* out, size_t capacity) {
    if (fit == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    const auto& b = fit->outcome.fit.beta_orig;
    if (capacity < static_cast<size_t>(b.size())) {
        return fail(CENBAR_ERROR_ARGUMENT, "output buffer too small");
    }
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        out[j] = b[j];
    }
    return CENBAR_OK;
}

double cenbar_fit_intercept(const cenbar_fit* fit) {
    return fit ? fit->outcome.fit.intercept : std::numeric_limits<double>::quiet_NaN();
}

double cenbar_fit_xi(const cenbar_fit* fit) {
    return fit ? fit->outcome.fit.xi : std::numeric_limits<double>::quiet_NaN();
}

double cenbar_fit_lambda(const cenbar_fit* fit) {
    return fit ? fit->outcome.fit.lambda : std::numeric_limits<double>::quiet_NaN();
}

double cenbar_fit_cv_error(const cenbar_fit* fit) {
    if (fit == nullptr || !fit->outcome.cv) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return fit->outcome.cv->best_error;
}

int32_t cenbar_fit_iterations(const cenbar_fit* fit) {
    return fit ? static_cast<int32_t>(fit->outcome.fit.iterations) : 0;
}

int32_t cenbar_fit_converged(const cenbar_fit* fit) {
    return fit && fit->outcome.fit.converged ? 1 : 0;
}

size_t cenbar_fit_support_size(const cenbar_fit* fit) {
    return fit ? fit->outcome.fit.support.size() : 0;
}

cenbar_status cenbar_fit_report_json(const cenbar_fit* fit, char** out) {
    if (fit == nullptr || out == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out = nullptr;
    return guarded([&] { *out = dup_string(cenbar::fit_report_json(fit->outcome)); });
}

void cenbar_run_options_init(cenbar_run_options* options) {
    if (options == nullptr) {
        return;
    }
    options->reps = 0;
    options->methods = nullptr;
    options->default_methods = nullptr;
    options->screen = -1;
    options->k = 0;
    options->seed_set = 0;
    options->seed = 0;
    options->threads = 1;
    options->format = CENBAR_FORMAT_JSON;
}

cenbar_status cenbar_run_scenario(const char* scenario_json, const cenbar_run_options* options,
                                  char** out_report) {
    if (scenario_json == nullptr || out_report == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out_report = nullptr;
    return guarded([&] {
        const ResolvedRun r = resolve_run(scenario_json, options);
        const auto report = cenbar::run_monte_carlo(r.scenario, r.options);
        const bool csv = options != nullptr && options->format == CENBAR_FORMAT_CSV;
        *out_report = dup_string(csv ? cenbar::io::report_to_csv(report)
                                     : cenbar::io::report_to_json(report));
    });
}

cenbar_status cenbar_simulate_dataset(const char* scenario_json, const cenbar_run_options* options,
                                      uint64_t rep, char** out_csv) {
    if (scenario_json == nullptr || out_csv == nullptr) {
        return fail(CENBAR_ERROR_ARGUMENT, "null argument");
    }
    *out_csv = nullptr;
    return guarded([&] {
        const ResolvedRun r = resolve_run(scenario_json, options);
        if (rep >= r.scenario.reps) {
            throw cenbar::InputError("replication " + std::to_string(rep) + " is out of range (reps = " +
                                     std::to_string(r.scenario.reps) + ")");
        }
        const double c = cenbar::calibrate_censoring_mean(r.scenario);
        const auto gen = cenbar::generate(r.scenario, c, static_cast<std::size_t>(rep));
        *out_csv = dup_string(cenbar::io::dataset_to_csv(gen.data));
    });
}

}  // extern "C"
