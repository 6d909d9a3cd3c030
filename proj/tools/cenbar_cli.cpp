// cenbar command-line tool. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cenbar/cenbar.h"

namespace {

struct Failure {
    int code;
    std::string message;
};

int exit_code(cenbar_status s) {
    switch (s) {
        case CENBAR_OK:
            return 0;
        case CENBAR_ERROR_INPUT:
        case CENBAR_ERROR_IO:
        case CENBAR_ERROR_ARGUMENT:
            return 2;
        case CENBAR_ERROR_DEGENERATE:
            return 3;
        case CENBAR_ERROR_NUMERICAL:
            return 4;
        default:
            return 1;
    }
}

void check(cenbar_status s) {
    if (s != CENBAR_OK) {
        throw Failure{exit_code(s), cenbar_last_error()};
    }
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Failure{2, "cannot open input '" + path + "'"};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Opened before any work so an unwritable path fails fast.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) {
                throw Failure{2, "cannot open output '" + path + "' for writing"};
            }
            to_file_ = true;
        }
    }
    void write(const char* text) {
        std::ostream& os = to_file_ ? static_cast<std::ostream&>(file_) : std::cout;
        os << text;
        os.flush();
        if (!os) {
            throw Failure{2, "write failed"};
        }
    }

private:
    std::ofstream file_;
    bool to_file_ = false;
};

// Owns a C string returned by the library.
struct CStr {
    char* p = nullptr;
    ~CStr() { cenbar_string_free(p); }
};

struct DatasetHandle {
    cenbar_dataset* p = nullptr;
    ~DatasetHandle() { cenbar_dataset_free(p); }
};

struct FitHandle {
    cenbar_fit* p = nullptr;
    ~FitHandle() { cenbar_fit_free(p); }
};

void load_dataset(const std::string& path, DatasetHandle& ds) {
    const std::string text = read_input(path);
    check(cenbar_dataset_parse_csv(text.data(), text.size(), &ds.p));
}

struct FitArgs {
    std::string input, output;
    std::uint64_t seed = 42;
    int folds = 5;
    std::optional<long long> k;
    bool screen = false;
    std::optional<double> xi, lambda;
    bool per_fold = false;
    double tol = 1e-8;
    int max_iter = 1000;
};

struct RunArgs {
    std::string input, output;
    std::optional<std::uint64_t> seed;
    std::optional<long long> reps;
    std::optional<std::string> methods;
    bool screen = false, no_screen = false;
    std::optional<long long> k;
    unsigned threads = 0;
    std::string format = "json";
    std::optional<std::uint64_t> dump_rep;
};

void run_fit(const FitArgs& a) {
    if (a.xi.has_value() != a.lambda.has_value()) {
        throw Failure{2, "--xi and --lambda must be given together"};
    }
    DatasetHandle ds;
    Output out(a.output);
    load_dataset(a.input, ds);
    cenbar_fit_options o;
    cenbar_fit_options_init(&o);
    o.folds = a.folds;
    o.seed = a.seed;
    if (a.xi) {
        o.fixed_tuning = 1;
        o.xi = *a.xi;
        o.lambda = *a.lambda;
    }
    if (a.k) {
        if (*a.k <= 0) throw Failure{2, "--k must be positive"};
        o.screen_k = *a.k;
    } else if (a.screen) {
        o.screen_k = 0;
    }
    o.per_fold_transform = a.per_fold ? 1 : 0;
    o.tol = a.tol;
    o.max_iter = a.max_iter;
    FitHandle fit;
    check(cenbar_fit_run(ds.p, &o, &fit.p));
    CStr json;
    check(cenbar_fit_report_json(fit.p, &json.p));
    out.write(json.p);
}

void run_transform(const std::string& input, const std::string& output) {
    DatasetHandle ds;
    Output out(output);
    load_dataset(input, ds);
    CStr csv;
    check(cenbar_transform_csv(ds.p, &csv.p));
    out.write(csv.p);
}

void run_scenario(const RunArgs& a, const char* default_methods) {
    if (a.format != "json" && a.format != "csv") {
        throw Failure{2, "--format must be json or csv"};
    }
    if (a.screen && a.no_screen) {
        throw Failure{2, "--screen and --no-screen are exclusive"};
    }
    Output out(a.output);
    const std::string scenario = read_input(a.input);
    cenbar_run_options o;
    cenbar_run_options_init(&o);
    if (a.reps) {
        if (*a.reps <= 0) throw Failure{2, "--reps must be positive"};
        o.reps = *a.reps;
    }
    if (a.methods) o.methods = a.methods->c_str();
    o.default_methods = default_methods;
    if (a.screen) o.screen = 1;
    if (a.no_screen) o.screen = 0;
    if (a.k) {
        if (*a.k <= 0) throw Failure{2, "--k must be positive"};
        o.k = *a.k;
    }
    if (a.seed) {
        o.seed_set = 1;
        o.seed = *a.seed;
    }
    o.threads = a.threads;
    o.format = a.format == "csv" ? CENBAR_FORMAT_CSV : CENBAR_FORMAT_JSON;
    CStr text;
    if (a.dump_rep) {
        check(cenbar_simulate_dataset(scenario.c_str(), &o, *a.dump_rep, &text.p));
    } else {
        check(cenbar_run_scenario(scenario.c_str(), &o, &text.p));
    }
    out.write(text.p);
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("-i,--input", a.input, "scenario JSON (default: stdin)");
    cmd->add_option("-o,--output", a.output, "report path (default: stdout)");
    cmd->add_option("--seed", a.seed, "master seed, overrides the scenario");
    cmd->add_option("--reps", a.reps, "replications, overrides the scenario");
    cmd->add_option("--methods", a.methods, "comma-separated: cbar,lasso,alasso,scad,mcp");
    cmd->add_flag("--screen", a.screen, "marginal screening before each fit");
    cmd->add_flag("--no-screen", a.no_screen, "disable screening set in the scenario");
    cmd->add_option("--k", a.k, "screened model size (implies --screen)");
    cmd->add_option("--threads", a.threads, "worker threads (0: all cores)");
    cmd->add_option("--format", a.format, "json or csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broken adaptive ridge for right-censored accelerated failure time data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cenbar_version()));

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "tune and fit on a time,event,covariates CSV");
    fit_cmd->add_option("-i,--input", fit.input, "CSV path (default: stdin)");
    fit_cmd->add_option("-o,--output", fit.output, "report path (default: stdout)");
    fit_cmd->add_option("--seed", fit.seed, "CV fold seed")->capture_default_str();
    fit_cmd->add_option("--folds", fit.folds, "CV folds")->capture_default_str();
    fit_cmd->add_option("--k", fit.k, "screen to k covariates first");
    fit_cmd->add_flag("--screen", fit.screen, "screen to the default k first");
    fit_cmd->add_option("--xi", fit.xi, "fixed ridge parameter (needs --lambda)");
    fit_cmd->add_option("--lambda", fit.lambda, "fixed penalty (needs --xi)");
    fit_cmd->add_flag("--per-fold-transform", fit.per_fold,
                      "rebuild the synthetic response inside each CV fold");
    fit_cmd->add_option("--tol", fit.tol, "iteration tolerance")->capture_default_str();
    fit_cmd->add_option("--max-iter", fit.max_iter, "iteration cap")->capture_default_str();

    std::string tr_in, tr_out;
    auto* tr_cmd = app.add_subcommand("transform", "append the synthetic response column");
    tr_cmd->add_option("-i,--input", tr_in, "CSV path (default: stdin)");
    tr_cmd->add_option("-o,--output", tr_out, "CSV path (default: stdout)");

    RunArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run a scenario (default method: cbar)");
    add_run_flags(sim_cmd, sim);
    sim_cmd->add_option("--dump-rep", sim.dump_rep, "write the dataset of one replication as CSV");

    RunArgs bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "run a scenario for every method");
    add_run_flags(bench_cmd, bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (*fit_cmd) {
            run_fit(fit);
        } else if (*tr_cmd) {
            run_transform(tr_in, tr_out);
        } else if (*sim_cmd) {
            run_scenario(sim, "cbar");
        } else if (*bench_cmd) {
            run_scenario(bench, "cbar,lasso,alasso,scad,mcp");
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << one_line(f.message) << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
