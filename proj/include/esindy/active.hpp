#pragma once

#include <cstdint>

#include "esindy/ensemble.hpp"
#include "esindy/metrics.hpp"
#include "esindy/systems.hpp"

namespace esindy {

enum class IcPolicy { max_variance, random };

struct ActiveConfig {
    int n_candidate_ics = 200;
    int probe_horizon_steps = 1;   // forecast horizon for the variance probe
    int n_iterations = 30;
    int initial_data_budget = 100; // samples in the initial training set
    int probe_trajectory_steps = 10;  // samples appended per iteration
    std::vector<std::pair<double, double>> ic_region;  // per-state bounds
    double dt = 0.01;
    double noise_sigma = 0.0;      // measurement noise on collected data
    IcPolicy policy = IcPolicy::max_variance;
    std::uint64_t seed = 0;

    void validate(int state_dim) const;
};

// Integrates every stack member from ic for horizon_steps and returns the
// trace of the empirical covariance of the terminal states (N-1 normalized).
// Diverged members are excluded; if every member diverges the variance is the
// +infinity sentinel.
double forecast_variance(const EnsembleResult& result, const LibrarySpec& spec,
                         const std::vector<std::string>& state_names, const Vector& ic,
                         int horizon_steps, double dt);

struct ActiveIteration {
    Vector chosen_ic;
    double chosen_variance = 0.0;
    double mean_coefficient_stddev = 0.0;
    int training_samples = 0;
    TrialReport report;
};

struct ActiveHistory {
    std::vector<ActiveIteration> iterations;  // entry 0 is the initial model
    EnsembleResult final_model;
    bool converged_early = false;
};

// Three-step loop: fit an ensemble on the collected data, score candidate
// initial conditions by ensemble forecast variance, sample the true system at
// the best one and append the probe trajectory. Stops after n_iterations or
// when the mean coefficient standard deviation changes by less than 1e-3
// relative over 5 consecutive iterations.
ActiveHistory active_loop(const SystemDefinition& system, const ActiveConfig& cfg,
                          const RegressionConfig& reg, const EnsembleConfig& ens);

}  // namespace esindy
