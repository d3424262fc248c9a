#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "esindy/ensemble.hpp"
#include "esindy/types.hpp"

namespace esindy {

struct CsvTable {
    std::vector<std::string> columns;  // empty if the file has no header
    Matrix values;
};

// CSV with an optional header row; numeric cells written as "%.17g" so values
// round-trip exactly.
void write_csv(const std::string& path, const std::vector<std::string>& columns, const Matrix& values);
CsvTable read_csv(const std::string& path);

// DataMatrix as data.csv (header = state names) + meta.json carrying dt.
void save_data_matrix(const std::string& dir, const DataMatrix& data,
                      const nlohmann::json& extra_meta);
DataMatrix load_data_matrix(const std::string& csv_path, double dt_override = 0.0);

// Spatio-temporal field: headerless CSV (rows = time, columns = space) plus a
// sidecar JSON with dx, dt and the grid sizes.
void save_field(const std::string& csv_path, const Field& field);
Field load_field(const std::string& csv_path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json coefficients_to_json(const CoefficientMatrix& cm);
CoefficientMatrix coefficients_from_json(const nlohmann::json& j);

nlohmann::json ensemble_result_to_json(const EnsembleResult& result,
                                       const std::vector<std::string>& term_labels,
                                       const std::vector<std::string>& state_labels);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Human-readable model equations, e.g. "d(x)/dt = -10 x + 10 y".
std::string format_equations(const CoefficientMatrix& cm);

}  // namespace esindy
