#include "esindy/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace esindy {

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool looks_numeric(const std::string& tok) {
    if (tok.empty()) return false;
    char* end = nullptr;
    std::strtod(tok.c_str(), &end);
    return end == tok.c_str() + tok.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
        std::size_t start = 0;
        while (start < tok.size() && tok[start] == ' ') ++start;
        out.push_back(tok.substr(start));
    }
    return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& columns, const Matrix& values) {
    std::ofstream f(path);
    if (!f) throw IngestionError("cannot open for writing: " + path);
    if (!columns.empty()) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c > 0) f << ',';
            f << columns[c];
        }
        f << '\n';
    }
    for (long i = 0; i < values.rows(); ++i) {
        for (long j = 0; j < values.cols(); ++j) {
            if (j > 0) f << ',';
            f << format_full(values(i, j));
        }
        f << '\n';
    }
    if (!f) throw IngestionError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IngestionError("cannot open: " + path);
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty() || line == "\r") continue;
        auto toks = split_csv_line(line);
        if (first) {
            first = false;
            bool header = false;
            for (auto& t : toks) {
                if (!looks_numeric(t)) header = true;
            }
            if (header) {
                table.columns = toks;
                continue;
            }
        }
        std::vector<double> row;
        row.reserve(toks.size());
        for (auto& t : toks) {
            if (!looks_numeric(t)) throw IngestionError("non-numeric cell '" + t + "' in " + path);
            row.push_back(std::strtod(t.c_str(), nullptr));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IngestionError("ragged CSV rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IngestionError("no data rows in " + path);
    table.values.resize(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            table.values(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
        }
    }
    return table;
}

void save_data_matrix(const std::string& dir, const DataMatrix& data, const nlohmann::json& extra_meta) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_csv((fs::path(dir) / "data.csv").string(), data.names, data.values);
    nlohmann::json meta = extra_meta;
    meta["dt"] = data.dt;
    meta["names"] = data.names;
    meta["rows"] = data.rows();
    write_json((fs::path(dir) / "meta.json").string(), meta);
}

DataMatrix load_data_matrix(const std::string& csv_path, double dt_override) {
    CsvTable table = read_csv(csv_path);
    DataMatrix out;
    out.values = table.values;
    out.names = table.columns;
    out.dt = dt_override;
    if (out.dt <= 0.0) {
        const auto meta_path = std::filesystem::path(csv_path).parent_path() / "meta.json";
        if (std::filesystem::exists(meta_path)) {
            const auto meta = read_json(meta_path.string());
            if (meta.contains("dt")) out.dt = meta["dt"].get<double>();
        }
    }
    if (out.names.empty()) {
        for (long j = 0; j < out.values.cols(); ++j) out.names.push_back("x" + std::to_string(j));
    }
    return out;
}

void save_field(const std::string& csv_path, const Field& field) {
    write_csv(csv_path, {}, field.values);
    nlohmann::json meta = {{"dt", field.dt},
                           {"dx", field.dx},
                           {"time_points", field.time_points()},
                           {"space_points", field.space_points()}};
    write_json(csv_path + ".json", meta);
}

Field load_field(const std::string& csv_path) {
    CsvTable table = read_csv(csv_path);
    const std::string meta_path = csv_path + ".json";
    if (!std::filesystem::exists(meta_path)) {
        throw IngestionError("field sidecar not found: " + meta_path);
    }
    const auto meta = read_json(meta_path);
    Field f;
    f.values = table.values;
    f.dt = meta.at("dt").get<double>();
    f.dx = meta.at("dx").get<double>();
    if (meta.contains("time_points") && meta["time_points"].get<int>() != f.time_points()) {
        throw IngestionError("field sidecar grid size disagrees with the CSV");
    }
    return f;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (long i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const long r = static_cast<long>(j.size());
    const long c = r > 0 ? static_cast<long>(j[0].size()) : 0;
    Matrix m(r, c);
    for (long i = 0; i < r; ++i) {
        for (long k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

nlohmann::json coefficients_to_json(const CoefficientMatrix& cm) {
    return {{"terms", cm.term_labels}, {"states", cm.state_labels}, {"xi", matrix_to_json(cm.xi)}};
}

CoefficientMatrix coefficients_from_json(const nlohmann::json& j) {
    CoefficientMatrix cm;
    cm.term_labels = j.at("terms").get<std::vector<std::string>>();
    cm.state_labels = j.at("states").get<std::vector<std::string>>();
    cm.xi = matrix_from_json(j.at("xi"));
    return cm;
}

nlohmann::json ensemble_result_to_json(const EnsembleResult& result,
                                       const std::vector<std::string>& term_labels,
                                       const std::vector<std::string>& state_labels) {
    nlohmann::json j;
    j["term_labels"] = term_labels;
    j["state_labels"] = state_labels;
    j["inclusion_probabilities"] = matrix_to_json(result.inclusion_probabilities);
    j["aggregated"] = matrix_to_json(result.aggregated.xi);
    j["stats"] = {{"mean", matrix_to_json(result.stats.mean)},
                  {"median", matrix_to_json(result.stats.median)},
                  {"stddev", matrix_to_json(result.stats.stddev)}};
    j["config"] = {{"n_models", result.config.n_models},
                   {"aggregation", result.config.aggregation == Aggregation::mean ? "mean" : "median"},
                   {"ip_threshold", result.config.ip_threshold},
                   {"library_fraction", result.config.library_fraction},
                   {"seed", result.config.seed}};
    j["warnings"] = result.warnings;
    if (result.stage1_inclusion_probabilities.size() > 0) {
        j["stage1_inclusion_probabilities"] = matrix_to_json(result.stage1_inclusion_probabilities);
        j["retained_terms"] = result.retained_terms;
    }
    nlohmann::json stack = nlohmann::json::array();
    for (const auto& m : result.coefficient_stack) stack.push_back(matrix_to_json(m));
    j["coefficient_stack"] = std::move(stack);
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) throw IngestionError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IngestionError("cannot open: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

std::string format_equations(const CoefficientMatrix& cm) {
    std::string out;
    for (int s = 0; s < cm.states(); ++s) {
        out += "d(" + cm.state_labels[s] + ")/dt =";
        bool any = false;
        for (int t = 0; t < cm.terms(); ++t) {
            const double v = cm.xi(t, s);
            if (v == 0.0) continue;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6g", std::abs(v));
            out += any ? (v < 0 ? " - " : " + ") : (v < 0 ? " -" : " ");
            out += buf;
            if (cm.term_labels[t] != "1") out += " " + cm.term_labels[t];
            any = true;
        }
        if (!any) out += " 0";
        out += "\n";
    }
    return out;
}

}  // namespace esindy
