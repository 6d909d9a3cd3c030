#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cenbar/dataset.hpp"
#include "cenbar/error.hpp"
#include "cenbar/simulate.hpp"
#include "cenbar/synthetic.hpp"

namespace cenbar::io {

/// Scenario document violation; `pointer` is a JSON pointer to the bad field.
class SchemaError : public InputError {
public:
    SchemaError(std::string pointer, const std::string& what)
        : InputError(pointer + ": " + what), pointer(std::move(pointer)) {}
    std::string pointer;
};

/// Source lines kept verbatim so a transform can echo them back unchanged.
struct CsvText {
    std::string header;
    std::vector<std::string> rows;
};

/// Parses "time,event,<covariates...>" CSV (header required, ',' separator,
/// '.' decimal point, no quoting). Columns may appear in any order; every
/// column other than time and event is a covariate. Throws InputError naming
/// the line and column of the first bad cell.
SurvivalDataset read_dataset_csv(std::string_view text, CsvText* verbatim = nullptr);

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double v);

std::string dataset_to_csv(const SurvivalDataset& data);

/// The input rows with a trailing ystar column.
std::string append_column_csv(const CsvText& text, std::string_view name,
                              const Eigen::VectorXd& values);

/// Optional run settings that may ride along in a scenario document.
struct ScenarioExtras {
    std::optional<std::vector<Method>> methods;
    std::optional<bool> screen;
    std::optional<std::size_t> k;
};

/// Validates and decodes a scenario document. Missing fields take the
/// Scenario defaults; beta0 defaults to the model's coefficient vector.
Scenario scenario_from_json(std::string_view text, ScenarioExtras* extras = nullptr);

/// The "cenbar-report/1" document.
std::string report_to_json(const MonteCarloReport& report);
/// One row per method: method,misc,fp,fn,tm,sm,mspe,mab,failures,reps.
std::string report_to_csv(const MonteCarloReport& report);

}  // namespace cenbar::io
