#include "cenbar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

namespace cenbar::io {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::string strip_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

SurvivalDataset read_dataset_csv(std::string_view text, CsvText* verbatim) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
            line.remove_prefix(3);
        }
        if (!trim(line).empty()) {
            lines.emplace_back(line_no, line);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (lines.empty()) {
        throw InputError("CSV input is empty; a header row is required");
    }

    const auto header = split_cells(lines.front().second);
    std::vector<std::string> names;
    for (auto h : header) {
        names.push_back(strip_quotes(h));
    }
    std::optional<std::size_t> time_col;
    std::optional<std::size_t> event_col;
    std::vector<std::size_t> cov_cols;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c].empty()) {
            throw InputError("line " + std::to_string(lines.front().first) + ", column " +
                             std::to_string(c + 1) + ": empty column name in header");
        }
        if (names[c] == "time") {
            if (time_col) throw InputError("header has more than one 'time' column");
            time_col = c;
        } else if (names[c] == "event") {
            if (event_col) throw InputError("header has more than one 'event' column");
            event_col = c;
        } else {
            cov_cols.push_back(c);
        }
    }
    if (!time_col || !event_col) {
        throw InputError("header must contain 'time' and 'event' columns");
    }
    if (cov_cols.empty()) {
        throw InputError("header has no covariate columns");
    }
    const std::size_t n = lines.size() - 1;
    if (n == 0) {
        throw InputError("CSV has a header but no data rows");
    }

    SurvivalDataset d;
    d.times.resize(static_cast<Eigen::Index>(n));
    d.events.resize(n);
    d.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cov_cols.size()));
    for (auto c : cov_cols) {
        d.covariate_names.push_back(names[c]);
    }
    if (verbatim != nullptr) {
        verbatim->header = std::string(lines.front().second);
        verbatim->rows.clear();
    }

    for (std::size_t r = 0; r < n; ++r) {
        const auto [ln, line] = lines[r + 1];
        const auto cells = split_cells(line);
        const auto where = [&, ln = ln](std::size_t c) {
            return "line " + std::to_string(ln) + " (data row " + std::to_string(r + 1) +
                   "), column '" + names[c] + "'";
        };
        if (cells.size() != names.size()) {
            throw InputError("line " + std::to_string(ln) + " (data row " + std::to_string(r + 1) +
                             "): expected " + std::to_string(names.size()) + " cells, found " +
                             std::to_string(cells.size()));
        }
        const auto ri = static_cast<Eigen::Index>(r);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                throw InputError(where(c) + ": missing value");
            }
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw InputError(where(c) + ": cannot parse '" + std::string(cells[c]) +
                                 "' as a finite number");
            }
            if (c == *time_col) {
                d.times[ri] = *v;
            } else if (c == *event_col) {
                if (*v != 0.0 && *v != 1.0) {
                    throw InputError(where(c) + ": event must be 0 or 1, got " +
                                     std::string(cells[c]));
                }
                d.events[r] = static_cast<int>(*v);
            }
        }
        for (std::size_t k = 0; k < cov_cols.size(); ++k) {
            d.covariates(ri, static_cast<Eigen::Index>(k)) = *parse_number(cells[cov_cols[k]]);
        }
        if (verbatim != nullptr) {
            verbatim->rows.emplace_back(line);
        }
    }
    d.validate();
    return d;
}

std::string dataset_to_csv(const SurvivalDataset& data) {
    std::string out = "time,event";
    for (std::size_t j = 0; j < data.cols(); ++j) {
        out += ',';
        out += j < data.covariate_names.size() ? data.covariate_names[j] : "x" + std::to_string(j + 1);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < data.times.size(); ++i) {
        out += format_double(data.times[i]);
        out += ',';
        out += std::to_string(data.events[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
            out += ',';
            out += format_double(data.covariates(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string append_column_csv(const CsvText& text, std::string_view name,
                              const Eigen::VectorXd& values) {
    if (static_cast<std::size_t>(values.size()) != text.rows.size()) {
        throw InputError("appended column length does not match row count");
    }
    std::string out = text.header;
    out += ',';
    out += name;
    out += '\n';
    for (std::size_t i = 0; i < text.rows.size(); ++i) {
        out += text.rows[i];
        out += ',';
        out += format_double(values[static_cast<Eigen::Index>(i)]);
        out += '\n';
    }
    return out;
}

namespace {

template <class T>
T require_integer(const json& v, const std::string& ptr, long long lo, long long hi) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw SchemaError(ptr, "expected an integer");
    }
    if (v.is_number_unsigned()) {
        const auto u = v.get<unsigned long long>();
        if (hi >= 0 && u > static_cast<unsigned long long>(hi)) {
            throw SchemaError(ptr, "value out of range");
        }
        if (lo > 0 && u < static_cast<unsigned long long>(lo)) {
            throw SchemaError(ptr, "value must be at least " + std::to_string(lo));
        }
        return static_cast<T>(u);
    }
    const auto s = v.get<long long>();
    if (s < lo || (hi >= 0 && s > hi)) {
        throw SchemaError(ptr, "value out of range");
    }
    return static_cast<T>(s);
}

double require_number(const json& v, const std::string& ptr) {
    if (!v.is_number()) {
        throw SchemaError(ptr, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw SchemaError(ptr, "expected a finite number");
    }
    return d;
}

std::string valid_method_list() {
    std::string s;
    for (Method m : all_methods()) {
        if (!s.empty()) s += ", ";
        s += to_string(m);
    }
    return s;
}

}  // namespace

Scenario scenario_from_json(std::string_view text, ScenarioExtras* extras) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("", "scenario must be a JSON object");
    }
    static const std::vector<std::string> known = {
        "schema", "model", "n", "p", "rho", "censoring_rate", "beta0", "reps",
        "master_seed", "censoring_scale", "folds", "methods", "screen", "k"};
    for (const auto& item : doc.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw SchemaError("/" + item.key(), "unknown field");
        }
    }

    Scenario s;
    if (doc.contains("schema")) {
        if (!doc["schema"].is_string() || doc["schema"] != "cenbar-scenario/1") {
            throw SchemaError("/schema", "expected \"cenbar-scenario/1\"");
        }
    }
    if (doc.contains("model")) s.model = require_integer<int>(doc["model"], "/model", 1, 2);
    if (doc.contains("n")) s.n = require_integer<std::size_t>(doc["n"], "/n", 2, -1);
    if (doc.contains("p")) s.p = require_integer<std::size_t>(doc["p"], "/p", 1, -1);
    if (doc.contains("rho")) {
        s.rho = require_number(doc["rho"], "/rho");
        if (!(s.rho >= 0.0 && s.rho < 1.0)) throw SchemaError("/rho", "must lie in [0, 1)");
    }
    if (doc.contains("censoring_rate")) {
        s.censoring_rate = require_number(doc["censoring_rate"], "/censoring_rate");
        if (!(s.censoring_rate >= 0.0 && s.censoring_rate < 1.0)) {
            throw SchemaError("/censoring_rate", "must lie in [0, 1)");
        }
    }
    if (doc.contains("reps")) s.reps = require_integer<std::size_t>(doc["reps"], "/reps", 1, -1);
    if (doc.contains("master_seed")) {
        s.master_seed = require_integer<std::uint64_t>(doc["master_seed"], "/master_seed", 0, -1);
    }
    if (doc.contains("folds")) {
        s.folds = require_integer<std::size_t>(doc["folds"], "/folds", 2, -1);
        if (s.folds > s.n) throw SchemaError("/folds", "must not exceed n");
    }
    if (doc.contains("censoring_scale")) {
        const auto& v = doc["censoring_scale"];
        if (v == "variance") {
            s.censoring_scale = CensoringScale::variance;
        } else if (v == "sd") {
            s.censoring_scale = CensoringScale::sd;
        } else {
            throw SchemaError("/censoring_scale", "expected \"variance\" or \"sd\"");
        }
    }
    if (doc.contains("beta0")) {
        const auto& b = doc["beta0"];
        if (!b.is_array()) throw SchemaError("/beta0", "expected an array of numbers");
        if (b.size() != s.p) {
            throw SchemaError("/beta0", "length " + std::to_string(b.size()) + " differs from p = " +
                                            std::to_string(s.p));
        }
        s.beta0.resize(static_cast<Eigen::Index>(b.size()));
        for (std::size_t j = 0; j < b.size(); ++j) {
            s.beta0[static_cast<Eigen::Index>(j)] =
                require_number(b[j], "/beta0/" + std::to_string(j));
        }
    } else {
        s.beta0 = Scenario::default_beta0(s.model, s.p);
    }

    if (extras != nullptr) {
        *extras = ScenarioExtras{};
        if (doc.contains("methods")) {
            const auto& m = doc["methods"];
            if (!m.is_array() || m.empty()) {
                throw SchemaError("/methods", "expected a non-empty array of method names");
            }
            std::vector<Method> methods;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const std::string ptr = "/methods/" + std::to_string(i);
                if (!m[i].is_string()) throw SchemaError(ptr, "expected a string");
                const auto parsed = parse_method(m[i].get<std::string>());
                if (!parsed) {
                    throw SchemaError(ptr, "unknown method '" + m[i].get<std::string>() +
                                               "' (valid: " + valid_method_list() + ")");
                }
                methods.push_back(*parsed);
            }
            extras->methods = std::move(methods);
        }
        if (doc.contains("screen")) {
            if (!doc["screen"].is_boolean()) throw SchemaError("/screen", "expected true or false");
            extras->screen = doc["screen"].get<bool>();
        }
        if (doc.contains("k")) {
            extras->k = require_integer<std::size_t>(doc["k"], "/k", 1, -1);
        }
    }

    try {
        s.validate();
    } catch (const InputError& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        throw SchemaError("/" + msg.substr(0, colon), msg.substr(colon + 2));
    }
    return s;
}

namespace {

json scenario_json(const MonteCarloReport& r) {
    const Scenario& s = r.scenario;
    json j;
    j["model"] = s.model;
    j["n"] = s.n;
    j["p"] = s.p;
    j["rho"] = s.rho;
    j["censoring_rate"] = s.censoring_rate;
    j["censoring_scale"] = s.censoring_scale == CensoringScale::variance ? "variance" : "sd";
    j["beta0"] = std::vector<double>(s.beta0.data(), s.beta0.data() + s.beta0.size());
    j["reps"] = s.reps;
    j["master_seed"] = s.master_seed;
    j["folds"] = s.folds;
    j["screen"] = r.options.use_screening;
    j["k"] = r.k_used;
    json methods = json::array();
    for (Method m : r.options.methods) {
        methods.push_back(std::string(to_string(m)));
    }
    j["methods"] = methods;
    return j;
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::string report_to_json(const MonteCarloReport& report) {
    json doc;
    doc["schema"] = "cenbar-report/1";
    doc["scenario"] = scenario_json(report);
    doc["censoring"] = {{"calibrated_mean", finite_or_null(report.censoring_mean)},
                        {"observed_rate", report.mean_censored_fraction}};
    json methods = json::array();
    for (const auto& m : report.methods) {
        json e;
        e["name"] = std::string(to_string(m.method));
        e["misc"] = m.metrics.misc;
        e["fp"] = m.metrics.fp;
        e["fn"] = m.metrics.fn;
        e["tm"] = m.metrics.tm;
        e["sm"] = m.metrics.sm;
        e["mspe"] = finite_or_null(m.metrics.mspe);
        e["mab"] = m.metrics.mab;
        e["failures"] = m.failures;
        e["reps"] = m.metrics.reps;
        json diag;
        diag["fits"] = m.fits;
        diag["nonconverged"] = m.nonconverged;
        if (m.method == Method::cbar) {
            diag["fixed_point_violations"] = m.residual_violations;
            diag["max_fixed_point_residual"] = m.max_fixed_point_residual;
        } else {
            diag["max_kkt_violation"] = m.max_kkt;
        }
        if (!m.failure_messages.empty()) {
            diag["failure_messages"] = m.failure_messages;
        }
        e["diagnostics"] = diag;
        methods.push_back(e);
    }
    doc["methods"] = methods;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const MonteCarloReport& report) {
    std::string out = "method,misc,fp,fn,tm,sm,mspe,mab,failures,reps\n";
    for (const auto& m : report.methods) {
        out += std::string(to_string(m.method));
        for (double v : {m.metrics.misc, m.metrics.fp, m.metrics.fn, m.metrics.tm, m.metrics.sm,
                         m.metrics.mspe, m.metrics.mab}) {
            out += ',';
            out += format_double(v);
        }
        out += ',' + std::to_string(m.failures) + ',' + std::to_string(m.metrics.reps) + '\n';
    }
    return out;
}

}  // namespace cenbar::io
