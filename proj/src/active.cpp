#include "esindy/active.hpp"

#include <cmath>
#include <limits>

#include "esindy/differentiation.hpp"
#include "esindy/forecast.hpp"
#include "esindy/parallel.hpp"
#include "esindy/rng.hpp"

namespace esindy {

void ActiveConfig::validate(int state_dim) const {
    if (n_candidate_ics < 1 || probe_horizon_steps < 1 || n_iterations < 0 ||
        initial_data_budget < 3 || probe_trajectory_steps < 1) {
        throw ParameterError("active learning counts must be positive");
    }
    if (static_cast<int>(ic_region.size()) != state_dim) {
        throw ParameterError("ic_region must give bounds for every state");
    }
    for (auto& [lo, hi] : ic_region) {
        if (!(lo < hi)) throw ParameterError("ic_region bounds must be ordered");
    }
    if (dt <= 0.0) throw ParameterError("dt must be positive");
}

double forecast_variance(const EnsembleResult& result, const LibrarySpec& spec,
                         const std::vector<std::string>& state_names, const Vector& ic,
                         int horizon_steps, double dt) {
    if (horizon_steps < 1) throw ParameterError("horizon must be at least one step");
    const int q = result.members();
    const int n = static_cast<int>(ic.size());
    std::vector<Vector> terminal;
    terminal.reserve(q);
    const Vector no_control = Vector::Zero(0);
    for (int b = 0; b < q; ++b) {
        CoefficientMatrix cm;
        cm.xi = result.coefficient_stack[b];
        cm.term_labels = result.aggregated.term_labels;
        cm.state_labels = state_names;
        const SystemDefinition model = model_rhs(cm, spec);
        Vector state = ic;
        bool ok = true;
        for (int k = 0; k < horizon_steps; ++k) {
            state = rk4_step(model.rhs, state, no_control, dt);
            if (!state.allFinite()) {
                ok = false;
                break;
            }
        }
        if (ok) terminal.push_back(state);
    }
    if (terminal.empty()) return std::numeric_limits<double>::infinity();
    if (terminal.size() == 1) return 0.0;

    Vector mean = Vector::Zero(n);
    for (const auto& t : terminal) mean += t;
    mean /= static_cast<double>(terminal.size());
    double trace = 0.0;
    for (const auto& t : terminal) trace += (t - mean).squaredNorm();
    return trace / static_cast<double>(terminal.size() - 1);
}

namespace {

Vector random_ic(const std::vector<std::pair<double, double>>& region, std::mt19937_64& rng) {
    Vector ic(static_cast<int>(region.size()));
    for (std::size_t i = 0; i < region.size(); ++i) {
        std::uniform_real_distribution<double> pick(region[i].first, region[i].second);
        ic[static_cast<int>(i)] = pick(rng);
    }
    return ic;
}

}  // namespace

ActiveHistory active_loop(const SystemDefinition& system, const ActiveConfig& cfg,
                          const RegressionConfig& reg, const EnsembleConfig& ens) {
    cfg.validate(system.state_dim);

    auto ic_rng = make_engine(cfg.seed, 1);
    auto pick_rng = make_engine(cfg.seed, 2);
    std::uint64_t noise_counter = 0;

    // initial training set: one short trajectory from a random ic
    auto collect = [&](const Vector& ic, int samples) {
        DataMatrix traj = simulate_ode(system, ic, samples * cfg.dt, cfg.dt);
        traj.values.conservativeResize(samples, system.state_dim);  // exactly `samples` rows
        if (cfg.noise_sigma > 0.0) {
            traj = add_noise(traj, cfg.noise_sigma, substream_seed(cfg.seed, 1000 + noise_counter++));
        }
        return traj;
    };

    DataMatrix training = collect(random_ic(cfg.ic_region, ic_rng), cfg.initial_data_budget);
    training.names = system.state_names;

    ActiveHistory history;

    auto refit = [&](int iteration) {
        EnsembleConfig e = ens;
        e.seed = substream_seed(ens.seed, 7000 + static_cast<std::uint64_t>(iteration));
        const auto theta = build_library(training, system.library_spec);
        const auto ut = finite_difference_time(training);
        return bagging(theta, ut, reg, e);
    };

    EnsembleResult model = refit(0);

    auto record = [&](const Vector& ic, double var) {
        ActiveIteration it;
        it.chosen_ic = ic;
        it.chosen_variance = var;
        it.mean_coefficient_stddev = model.stats.stddev.mean();
        it.training_samples = training.rows();
        it.report.coefficient_error = coefficient_error(system.true_coefficients.xi, model.aggregated.xi);
        it.report.success = support_success(system.true_coefficients.xi, model.aggregated.xi);
        it.report.seed = cfg.seed;
        history.iterations.push_back(std::move(it));
    };
    record(training.values.row(0), 0.0);

    int stable_streak = 0;
    for (int iter = 1; iter <= cfg.n_iterations; ++iter) {
        std::vector<Vector> candidates(cfg.n_candidate_ics);
        for (int c = 0; c < cfg.n_candidate_ics; ++c) candidates[c] = random_ic(cfg.ic_region, ic_rng);

        std::vector<double> variance(cfg.n_candidate_ics, 0.0);
        parallel_for(cfg.n_candidate_ics, [&](int c) {
            variance[c] = forecast_variance(model, system.library_spec, system.state_names,
                                            candidates[c], cfg.probe_horizon_steps, cfg.dt);
        });

        int chosen = 0;
        if (cfg.policy == IcPolicy::max_variance) {
            for (int c = 1; c < cfg.n_candidate_ics; ++c) {
                if (variance[c] > variance[chosen]) chosen = c;  // ties keep the lowest index
            }
        } else {
            std::uniform_int_distribution<int> pick(0, cfg.n_candidate_ics - 1);
            chosen = pick(pick_rng);
        }

        const DataMatrix probe = collect(candidates[chosen], cfg.probe_trajectory_steps);
        const long old_rows = training.values.rows();
        training.values.conservativeResize(old_rows + probe.values.rows(), Eigen::NoChange);
        training.values.bottomRows(probe.values.rows()) = probe.values;

        const double prev_std = model.stats.stddev.mean();
        model = refit(iter);
        record(candidates[chosen], variance[chosen]);

        const double cur_std = model.stats.stddev.mean();
        const double rel = std::abs(cur_std - prev_std) / std::max(std::abs(prev_std), 1e-300);
        stable_streak = rel < 1e-3 ? stable_streak + 1 : 0;
        if (stable_streak >= 5) {
            history.converged_early = true;
            break;
        }
    }

    history.final_model = std::move(model);
    return history;
}

}  // namespace esindy
