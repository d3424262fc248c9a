#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "esindy/regression.hpp"
#include "esindy/types.hpp"

namespace esindy {

enum class Aggregation { mean, median };

struct EnsembleConfig {
    int n_models = 100;            // q
    Aggregation aggregation = Aggregation::mean;
    double ip_threshold = 0.6;     // tol
    double library_fraction = 0.6; // l/D for library bagging
    std::uint64_t seed = 0;

    void validate() const;
};

struct PerCoefficientStats {
    Matrix mean;
    Matrix median;
    Matrix stddev;  // sample standard deviation over the stack (0 for q=1)
};

struct EnsembleResult {
    std::vector<Matrix> coefficient_stack;  // q matrices, D x n, original term indexing
    Matrix inclusion_probabilities;         // D x n
    CoefficientMatrix aggregated;           // ip-thresholded aggregate model
    PerCoefficientStats stats;
    EnsembleConfig config;
    std::vector<std::string> warnings;

    // Library bagging extras: first-stage conditional inclusion probabilities
    // and the term indices kept for the second-stage bagging run.
    Matrix stage1_inclusion_probabilities;  // empty unless library bagging
    std::vector<int> retained_terms;

    int members() const { return static_cast<int>(coefficient_stack.size()); }
};

// m indices drawn uniformly with replacement; deterministic given the engine.
std::vector<int> bootstrap_rows(int m, std::mt19937_64& rng);

// ip[d,i] = (#members with coefficient (d,i) nonzero) / (#members where term d
// was a candidate). candidacy is q x D; empty means every term is always a
// candidate. A term that was never a candidate gets ip = 0 plus a warning.
Matrix inclusion_probabilities(const std::vector<Matrix>& stack,
                               const std::vector<std::vector<std::uint8_t>>& candidacy,
                               std::vector<std::string>* warnings = nullptr);

// Entries with ip < tol are zeroed; others pass through unchanged.
CoefficientMatrix threshold_by_ip(const CoefficientMatrix& xi, const Matrix& ip, double tol);

// Row sampler customization point; tests inject an identity sampler to check
// that a q=1 ensemble reduces exactly to sparsify_dynamics.
using RowSampler = std::function<std::vector<int>(int m, std::mt19937_64& rng)>;

EnsembleResult bagging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                       const RegressionConfig& reg, const EnsembleConfig& ens,
                       const RowSampler& sampler = {});

EnsembleResult bragging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                        const RegressionConfig& reg, const EnsembleConfig& ens,
                        const RowSampler& sampler = {});

// Stage 1: q sub-libraries of l = round(library_fraction * D) distinct terms,
// conditional inclusion probabilities, terms below tol dropped. Stage 2:
// bagging on the reduced library; its result is returned re-embedded in the
// original D-term indexing.
EnsembleResult library_bagging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                               const RegressionConfig& reg, const EnsembleConfig& ens);

// Subsample-based term screening followed by an unregularized least-squares
// fit on the retained terms over all data. Subsets have size floor(m/2) drawn
// without replacement, or size m with replacement when the flag is set.
CoefficientMatrix stability_selection(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                                      const RegressionConfig& reg, const EnsembleConfig& ens,
                                      bool with_replacement, Matrix* importance_out = nullptr);

}  // namespace esindy
