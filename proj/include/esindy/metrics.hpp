#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esindy/ensemble.hpp"
#include "esindy/systems.hpp"

namespace esindy {

// Relative Frobenius-norm coefficient error ||Xi - Xi_hat|| / ||Xi||.
double coefficient_error(const Matrix& true_xi, const Matrix& identified_xi);

// Exact zero/nonzero pattern match.
bool support_success(const Matrix& true_xi, const Matrix& identified_xi);

enum class FitMethod { sindy, bagging, bragging, library_bagging, stability_selection };

std::string method_name(FitMethod m);
FitMethod method_from_name(const std::string& name);

struct TrialReport {
    bool success = false;
    double coefficient_error = 0.0;
    std::vector<std::string> identified_support;
    std::uint64_t seed = 0;
};

struct SweepGrid {
    std::vector<double> noise_levels;   // sigma as fraction of trajectory rms
    std::vector<double> data_lengths;   // trajectory length T in seconds
    std::vector<FitMethod> methods;
};

struct SweepCell {
    double noise = 0.0;
    double length = 0.0;
    FitMethod method = FitMethod::sindy;
    double success_rate = 0.0;
    double mean_coefficient_error = 0.0;
    int realizations = 0;
    int failures = 0;  // trials that raised instead of producing a model
};

struct SweepReport {
    std::vector<SweepCell> cells;
};

// Protocol knobs shared by every trial in a sweep.
struct SweepProtocol {
    double dt = 0.01;
    Vector u0;                      // empty -> system benchmark default
    RegressionConfig regression;    // lambda1 = 0.2 baseline
    EnsembleConfig ensemble;        // q = 100 baseline
    double library_bagging_tol = 0.4;
};

// Runs every (noise, length, method) cell for n_realizations noise seeds.
// Trial seeds derive from (master seed, noise, length, trial) only, so the
// same noise realizations are shared across methods and the report does not
// depend on evaluation order.
SweepReport sweep(const SystemDefinition& system, const SweepGrid& grid, int n_realizations,
                  std::uint64_t seed, const SweepProtocol& protocol);

// One fit of the given method on (theta, ut); returns the identified matrix.
Matrix fit_by_method(FitMethod method, const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                     const RegressionConfig& reg, const EnsembleConfig& ens);

}  // namespace esindy
