#pragma once

#include <cstdint>

#include "esindy/ensemble.hpp"
#include "esindy/systems.hpp"

namespace esindy {

// Turns a coefficient matrix over an ODE-mode library into callable dynamics
// evaluating Theta(state) * Xi for a single state row.
SystemDefinition model_rhs(const CoefficientMatrix& xi, const LibrarySpec& spec);

struct QuantileBands {
    Matrix lower;
    Matrix median;
    Matrix upper;
};

struct ForecastEnsemble {
    std::vector<Matrix> trajectories;  // one per draw, truncated at divergence
    Matrix point_forecast;             // integration of the aggregated model
    QuantileBands bands;
    std::vector<int> valid_draws;      // per time sample
    std::vector<std::string> warnings;
    double dt = 0.0;
};

// Fig.-4 protocol: n_draws times, sample draw_size stack members without
// replacement, average their coefficients and integrate from u0. Bands are
// pointwise quantiles (linear interpolation between order statistics) at
// levels (1 -/+ coverage)/2 and 0.5. Diverged trajectories are truncated and
// excluded from quantiles beyond the truncation point.
ForecastEnsemble ensemble_forecast(const EnsembleResult& result, const LibrarySpec& spec,
                                   const std::vector<std::string>& state_names, const Vector& u0,
                                   double T, double dt, int n_draws, int draw_size, double coverage,
                                   std::uint64_t seed);

// Quantile with linear interpolation between order statistics; data is sorted
// in place.
double interpolated_quantile(std::vector<double>& values, double level);

}  // namespace esindy
