#include "cenbar/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "cenbar/comparators.hpp"
#include "cenbar/error.hpp"
#include "cenbar/screening.hpp"
#include "cenbar/synthetic.hpp"
#include "cenbar/tuning.hpp"

namespace cenbar {

namespace {

constexpr std::size_t kPilotDraws = 100000;
constexpr std::uint64_t kPilotStream = ~std::uint64_t{0};
constexpr std::size_t kMaxFailureMessages = 5;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Eigen::VectorXd Scenario::default_beta0(int model, std::size_t p) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    const std::vector<double> head = model == 2 ? std::vector<double>{3, -2, 6, 0.3, -0.2, 0.6}
                                                : std::vector<double>{3, -2, 0, 0, 6};
    for (std::size_t j = 0; j < head.size() && j < p; ++j) {
        b[static_cast<Eigen::Index>(j)] = head[j];
    }
    return b;
}

Scenario Scenario::defaults(int model, std::size_t n, std::size_t p) {
    Scenario s;
    s.model = model;
    s.n = n;
    s.p = p;
    s.beta0 = default_beta0(model, p);
    return s;
}

double Scenario::censoring_sd() const {
    return censoring_scale == CensoringScale::variance ? std::sqrt(2.0) : 2.0;
}

void Scenario::validate() const {
    if (model != 1 && model != 2) {
        throw InputError("model: must be 1 or 2");
    }
    if (n < 2) {
        throw InputError("n: must be at least 2");
    }
    if (p < 1) {
        throw InputError("p: must be at least 1");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw InputError("rho: must lie in [0, 1)");
    }
    if (!(censoring_rate >= 0.0 && censoring_rate < 1.0)) {
        throw InputError("censoring_rate: must lie in [0, 1)");
    }
    if (static_cast<std::size_t>(beta0.size()) != p) {
        throw InputError("beta0: length must equal p");
    }
    if (!beta0.allFinite()) {
        throw InputError("beta0: entries must be finite");
    }
    if (reps < 1) {
        throw InputError("reps: must be at least 1");
    }
    if (folds < 2 || folds > n) {
        throw InputError("folds: must satisfy 2 <= folds <= n");
    }
}

double calibrate_censoring_mean(const Scenario& scenario) {
    scenario.validate();
    if (scenario.censoring_rate == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    // only coordinates up to the last nonzero coefficient affect x'beta0
    Eigen::Index last = -1;
    for (Eigen::Index j = 0; j < scenario.beta0.size(); ++j) {
        if (scenario.beta0[j] != 0.0) {
            last = j;
        }
    }
    std::mt19937_64 rng(derive_seed(scenario.master_seed, kPilotStream));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innov = std::sqrt(1.0 - scenario.rho * scenario.rho);
    const double sd = scenario.censoring_sd();

    // censored iff Y > C = c + sd Z, i.e. iff Y - sd Z > c
    std::vector<double> margin(kPilotDraws);
    for (auto& v : margin) {
        double x = 0.0;
        double lin = 0.0;
        for (Eigen::Index j = 0; j <= last; ++j) {
            const double z = normal(rng);
            x = j == 0 ? z : scenario.rho * x + innov * z;
            lin += x * scenario.beta0[j];
        }
        const double y = lin + normal(rng);
        v = y - sd * normal(rng);
    }
    std::sort(margin.begin(), margin.end());
    const auto rate_at = [&](double c) {
        const auto above = margin.end() - std::upper_bound(margin.begin(), margin.end(), c);
        return static_cast<double>(above) / static_cast<double>(margin.size());
    };

    const double target = scenario.censoring_rate;
    double lo = margin.front() - 1.0;  // rate 1
    double hi = margin.back() + 1.0;   // rate 0
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double c = 0.5 * (lo + hi);
    if (std::abs(rate_at(c) - target) > 0.005) {
        throw NumericalError("censoring calibration did not reach the target rate " +
                             std::to_string(target));
    }
    return c;
}

GeneratedData generate(const Scenario& scenario, double censoring_mean, std::size_t rep_index) {
    scenario.validate();
    const auto n = static_cast<Eigen::Index>(scenario.n);
    const auto p = static_cast<Eigen::Index>(scenario.p);
    std::mt19937_64 rng(derive_seed(scenario.master_seed, 2 * static_cast<std::uint64_t>(rep_index)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innov = std::sqrt(1.0 - scenario.rho * scenario.rho);
    const double sd = scenario.censoring_sd();

    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd times(n);
    std::vector<int> events(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double prev = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double z = normal(rng);
            prev = j == 0 ? z : scenario.rho * prev + innov * z;
            x(i, j) = prev;
        }
        const double y = x.row(i).dot(scenario.beta0) + normal(rng);
        const double c = censoring_mean + sd * normal(rng);
        const bool observed = y <= c;
        times[i] = observed ? y : c;
        events[static_cast<std::size_t>(i)] = observed ? 1 : 0;
    }
    GeneratedData out{make_dataset(std::move(times), std::move(events), std::move(x)), scenario.beta0};
    return out;
}

SelectionRecord score_selection(const std::vector<std::size_t>& support_hat,
                                const std::vector<std::size_t>& support_true,
                                const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true,
                                double mspe) {
    std::vector<std::size_t> est = support_hat;
    std::vector<std::size_t> truth = support_true;
    std::sort(est.begin(), est.end());
    est.erase(std::unique(est.begin(), est.end()), est.end());
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());

    std::vector<std::size_t> common;
    std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(),
                          std::back_inserter(common));

    SelectionRecord r;
    r.fp = static_cast<double>(est.size() - common.size());
    r.fn = static_cast<double>(truth.size() - common.size());
    r.misc = r.fp + r.fn;
    r.tm = est == truth ? 1.0 : 0.0;
    if (est.empty() && truth.empty()) {
        r.sm = 1.0;
    } else if (est.empty() || truth.empty()) {
        r.sm = 0.0;
    } else {
        r.sm = static_cast<double>(common.size()) /
               std::sqrt(static_cast<double>(est.size()) * static_cast<double>(truth.size()));
    }
    r.mspe = mspe;
    if (beta_hat.size() != beta_true.size()) {
        throw InputError("estimated and true coefficient vectors differ in length");
    }
    r.mab = beta_hat.size() == 0 ? 0.0 : (beta_hat - beta_true).cwiseAbs().mean();
    return r;
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::cbar: return "cbar";
        case Method::lasso: return "lasso";
        case Method::alasso: return "alasso";
        case Method::scad: return "scad";
        case Method::mcp: return "mcp";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : all_methods()) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {Method::cbar, Method::lasso, Method::alasso,
                                                Method::scad, Method::mcp};
    return methods;
}

namespace {

PenaltyKind penalty_of(Method m) {
    switch (m) {
        case Method::lasso: return PenaltyKind::lasso;
        case Method::alasso: return PenaltyKind::alasso;
        case Method::scad: return PenaltyKind::scad;
        case Method::mcp: return PenaltyKind::mcp;
        case Method::cbar: break;
    }
    throw InputError("cbar has no comparator penalty");
}

struct MethodOutcome {
    bool ok = false;
    std::string error;
    SelectionRecord record;
    FitStats stats;
    std::size_t fits = 0;
    std::size_t nonconverged = 0;
    double max_kkt = 0.0;
};

struct RepOutcome {
    double censored_fraction = 0.0;
    bool generated = false;
    std::vector<MethodOutcome> methods;
};

RepOutcome run_replication(const Scenario& scenario, const MonteCarloOptions& options,
                           double censoring_mean, std::size_t k, std::size_t rep) {
    RepOutcome out;
    out.methods.resize(options.methods.size());

    std::vector<std::size_t> truth;
    for (Eigen::Index j = 0; j < scenario.beta0.size(); ++j) {
        if (scenario.beta0[j] != 0.0) {
            truth.push_back(static_cast<std::size_t>(j));
        }
    }

    StandardizedDesign design;
    SyntheticResponse ystar;
    std::vector<std::size_t> cols;
    try {
        const GeneratedData gen = generate(scenario, censoring_mean, rep);
        out.censored_fraction = gen.data.censored_fraction();
        out.generated = true;
        const StandardizedDesign full = standardize(gen.data.covariates);
        ystar = leurgans_transform(gen.data);
        if (options.use_screening && k < scenario.p) {
            cols = marginal_screen(full, ystar, k).kept;
            std::sort(cols.begin(), cols.end());
            design = restrict_columns(full, cols);
        } else {
            cols.resize(scenario.p);
            for (std::size_t j = 0; j < scenario.p; ++j) {
                cols[j] = j;
            }
            design = full;
        }
    } catch (const std::exception& e) {
        for (auto& m : out.methods) {
            m.error = std::string("data preparation failed: ") + e.what();
        }
        return out;
    }

    const std::uint64_t cv_seed =
        derive_seed(scenario.master_seed, 2 * static_cast<std::uint64_t>(rep) + 1);
    const auto p = static_cast<Eigen::Index>(scenario.p);

    for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
        MethodOutcome& mo = out.methods[mi];
        const Method method = options.methods[mi];
        try {
            Eigen::VectorXd reduced_beta;
            double mspe = 0.0;
            if (method == Method::cbar) {
                CvOptions cv;
                cv.folds = scenario.folds;
                cv.seed = cv_seed;
                auto tuned = tune_and_fit(design, ystar, cv);
                reduced_beta = tuned.fit.beta_orig;
                mspe = tuned.cv.best_error;
                mo.stats = tuned.cv.stats;
                mo.fits = tuned.cv.stats.fits;
                mo.nonconverged = tuned.cv.stats.fits - tuned.cv.stats.converged;
            } else {
                ComparatorOptions co;
                co.folds = scenario.folds;
                co.seed = cv_seed;
                if (method == Method::alasso) {
                    co.xi_values = make_grid(design, ystar).xi_values;
                }
                auto fit = tune_and_fit_comparator(design, ystar, penalty_of(method), co);
                reduced_beta = fit.beta_orig;
                mspe = fit.cv.best_error;
                mo.fits = fit.cv.fits;
                mo.nonconverged = fit.cv.nonconverged;
                mo.max_kkt = fit.cv.max_kkt;
            }
            Eigen::VectorXd beta_hat = Eigen::VectorXd::Zero(p);
            std::vector<std::size_t> support;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const double v = reduced_beta[static_cast<Eigen::Index>(c)];
                beta_hat[static_cast<Eigen::Index>(cols[c])] = v;
                if (v != 0.0) {
                    support.push_back(cols[c]);
                }
            }
            mo.record = score_selection(support, truth, beta_hat, scenario.beta0, mspe);
            mo.ok = true;
        } catch (const std::exception& e) {
            mo.error = e.what();
        }
    }
    return out;
}

}  // namespace

MonteCarloReport run_monte_carlo(const Scenario& scenario, const MonteCarloOptions& options) {
    scenario.validate();
    if (options.methods.empty()) {
        throw InputError("methods: at least one method is required");
    }
    MonteCarloReport report;
    report.scenario = scenario;
    report.options = options;
    report.k_used = options.use_screening
                        ? std::min(options.k.value_or(default_k(scenario.n)), scenario.p)
                        : scenario.p;
    if (report.k_used < 1) {
        throw InputError("k: must be at least 1");
    }
    report.censoring_mean = calibrate_censoring_mean(scenario);

    std::vector<RepOutcome> reps(scenario.reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < reps.size(); r = next++) {
            reps[r] = run_replication(scenario, options, report.censoring_mean, report.k_used, r);
        }
    };
    const unsigned threads =
        std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(reps.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // fixed-order reduction
    std::size_t generated = 0;
    double censored = 0.0;
    for (const auto& r : reps) {
        if (r.generated) {
            ++generated;
            censored += r.censored_fraction;
        }
    }
    report.mean_censored_fraction = generated == 0 ? 0.0 : censored / static_cast<double>(generated);

    for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
        MethodSummary s;
        s.method = options.methods[mi];
        SelectionMetrics& m = s.metrics;
        FitStats stats;
        for (const auto& r : reps) {
            const MethodOutcome& mo = r.methods[mi];
            if (!mo.ok) {
                ++s.failures;
                if (s.failure_messages.size() < kMaxFailureMessages) {
                    s.failure_messages.push_back(mo.error);
                }
                continue;
            }
            ++m.reps;
            m.misc += mo.record.misc;
            m.fp += mo.record.fp;
            m.fn += mo.record.fn;
            m.tm += mo.record.tm;
            m.sm += mo.record.sm;
            m.mspe += mo.record.mspe;
            m.mab += mo.record.mab;
            stats.merge(mo.stats);
            s.fits += mo.fits;
            s.nonconverged += mo.nonconverged;
            s.max_kkt = std::max(s.max_kkt, mo.max_kkt);
        }
        if (m.reps > 0) {
            const double d = static_cast<double>(m.reps);
            m.misc /= d;
            m.fp /= d;
            m.fn /= d;
            m.tm /= d;
            m.sm /= d;
            m.mspe /= d;
            m.mab /= d;
        }
        s.residual_violations = stats.residual_violations;
        s.max_fixed_point_residual = stats.max_converged_residual;
        report.methods.push_back(std::move(s));
    }
    return report;
}

}  // namespace cenbar
