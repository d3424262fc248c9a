#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace esindy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error taxonomy. The CLI maps InputError/ParameterError/SpecError/ShapeError/
// IngestionError to exit code 1 and DivergenceError/NumericError to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Snapshot matrix of states over time: m rows (time samples) x n columns (states).
struct DataMatrix {
    Matrix values;
    double dt = 0.0;
    std::vector<std::string> names;

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }

    // Throws unless m >= 2, dt > 0 and every entry is finite.
    void validate() const;
};

// Gridded 1-D spatio-temporal field: rows = time samples, columns = space.
struct Field {
    Matrix values;
    double dt = 0.0;
    double dx = 0.0;

    int time_points() const { return static_cast<int>(values.rows()); }
    int space_points() const { return static_cast<int>(values.cols()); }

    void validate() const;
};

// Time derivatives of a DataMatrix, same shape as the source.
struct DerivativeMatrix {
    Matrix values;
    std::string method_tag;
};

// Sparse coefficient matrix Xi (D x n) mapping library terms to state derivatives.
struct CoefficientMatrix {
    Matrix xi;
    std::vector<std::string> term_labels;
    std::vector<std::string> state_labels;

    int terms() const { return static_cast<int>(xi.rows()); }
    int states() const { return static_cast<int>(xi.cols()); }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace esindy
