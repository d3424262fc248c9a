#pragma once

#include <string>
#include <vector>

#include "esindy/types.hpp"

namespace esindy {

// Candidate-function library specification. In ODE mode the variables are the
// data columns (states first, then control_inputs trailing columns, which take
// part in the monomial expansion so cross terms appear). In PDE mode the data
// is a single field u and the library adds spatial derivatives u_x..u_{x^R}
// and mixed advection-type products u^a*u_x.
struct LibrarySpec {
    int polynomial_degree = 2;
    bool include_constant = true;
    std::vector<double> trig_frequencies;
    int spatial_derivative_order = 0;
    bool include_mixed_terms = false;
    int control_inputs = 0;
};

enum class TermKind { constant, monomial, trig_sin, trig_cos, derivative, mixed };

// One library column. label fully determines how the column is computed.
struct Term {
    TermKind kind = TermKind::constant;
    std::vector<int> exponents;  // per-variable powers (monomial)
    int var = -1;                // variable index (trig)
    double frequency = 0.0;      // trig frequency
    int deriv_order = 0;         // spatial derivative order (derivative/mixed)
    int power = 0;               // u^power factor (mixed)
    std::string label;
};

// Deterministic column order: constant, monomials in graded-lexicographic
// order (control variables sort after states within each degree), trig terms,
// then in PDE mode derivatives and mixed terms.
std::vector<Term> enumerate_terms(const LibrarySpec& spec, const std::vector<std::string>& var_names,
                                  bool pde_mode);

struct EvaluatedLibrary {
    Matrix theta;  // m x D
    std::vector<std::string> term_labels;
    LibrarySpec spec;

    int rows() const { return static_cast<int>(theta.rows()); }
    int terms() const { return static_cast<int>(theta.cols()); }
};

// ODE-mode library over the data columns.
EvaluatedLibrary build_library(const DataMatrix& data, const LibrarySpec& spec);

// Spatial derivative columns u_x .. u_{x^max_order} of a gridded field,
// flattened column-major to (m*s) x max_order. Second-order central stencils
// in the interior, second-order one-sided stencils at the boundaries.
Matrix build_spatial_derivatives(const Field& field, double dx, int max_order);

// PDE-mode library over the flattened field (column-major, time fastest).
EvaluatedLibrary build_pde_library(const Field& field, const LibrarySpec& spec);

// Evaluates one library row at a single state (ODE mode only; derivative terms
// cannot be evaluated pointwise).
Vector evaluate_library_row(const Vector& vars, const LibrarySpec& spec,
                            const std::vector<Term>& terms);

// Variable name list used for term labels: data names plus generated control
// names ("u" for a single control, else "u1", "u2", ...).
std::vector<std::string> library_variable_names(const std::vector<std::string>& state_names,
                                                int control_inputs);

}  // namespace esindy
