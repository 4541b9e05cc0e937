#pragma once
// JSON and CSV emission with a fixed float format, and the persisted
// ConventionReport sidecar.

#include <optional>
#include <string>

#include "json.hpp"
#include "qmoduli/modular_mcg.hpp"

namespace qm {

using json = nlohmann::json;

// Object keys sorted, floats printed with %.17g, non-finite values as null.
std::string dump_json(const json& j, int indent = 2);

json complex_json(cplx z);
json matrix_json(const Mat& m);  // rows of [re, im] pairs
json residual_row(const Residual& r, int k);
json modular_json(const ModularData& md);
json torus_json(const TorusReport& r);

json conventions_json(const ConventionReport& c);
ConventionReport conventions_from_json(const json& j);  // throws std::runtime_error
std::optional<ConventionReport> load_conventions(const std::string& path);
void save_conventions(const std::string& path, const ConventionReport& c);  // throws std::runtime_error

// CSV cell with %.17g for numbers
std::string csv_number(double x);

}  // namespace qm
