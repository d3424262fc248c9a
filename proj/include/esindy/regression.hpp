#pragma once

#include <vector>

#include "esindy/library.hpp"
#include "esindy/types.hpp"

namespace esindy {

struct RegressionConfig {
    double lambda1 = 0.2;       // sparsification threshold
    double lambda2 = 0.0;       // ridge weight; 0 reduces STRidge to STLS
    int max_iterations = 10;
    // Scale columns to unit 2-norm before solving and un-scale afterwards;
    // the threshold applies to the un-scaled (physical) coefficients. Off by
    // default for ODE problems, on for the correlated PDE libraries.
    bool normalize_columns = false;

    void validate() const;
};

// Per-state diagnostics from sparsify_dynamics.
struct SparsifyInfo {
    std::vector<bool> all_zero;   // state ended with an empty support
    std::vector<bool> converged;  // support stabilized within max_iterations
};

// Minimizer of ||b - Theta x||^2 + lambda2 ||x||^2. With lambda2 = 0 the
// minimum-norm least-squares solution is returned (rank-revealing complete
// orthogonal decomposition), otherwise the ridge normal equations are solved.
Vector ridge_solve(const Matrix& theta, const Vector& b, double lambda2);

// Sequentially thresholded least squares / ridge: per state, solve, zero all
// coefficients with |xi| < lambda1, re-solve on the surviving columns, repeat
// until the support stops changing or max_iterations is reached.
CoefficientMatrix sparsify_dynamics(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                                    const RegressionConfig& config, SparsifyInfo* info = nullptr);

// Same solver on a raw system (used by the weak formulation, where rows are
// integration domains rather than time samples).
Matrix sparsify_system(const Matrix& theta, const Matrix& targets, const RegressionConfig& config,
                       SparsifyInfo* info = nullptr);

}  // namespace esindy
