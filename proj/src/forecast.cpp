#include "esindy/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esindy/parallel.hpp"
#include "esindy/rng.hpp"

namespace esindy {

SystemDefinition model_rhs(const CoefficientMatrix& xi, const LibrarySpec& spec) {
    const int n = xi.states();
    const int nc = spec.control_inputs;
    std::vector<std::string> var_names = library_variable_names(xi.state_labels, nc);
    if (static_cast<int>(var_names.size()) != n + nc) {
        var_names.clear();
        for (int i = 0; i < n + nc; ++i) var_names.push_back("x" + std::to_string(i));
    }
    const auto terms = enumerate_terms(spec, var_names, false);
    if (static_cast<int>(terms.size()) != xi.terms()) {
        throw ShapeError("coefficient matrix does not match the library spec term count");
    }

    SystemDefinition sys;
    sys.name = "identified";
    sys.state_dim = n;
    sys.control_dim = nc;
    sys.state_names = xi.state_labels;
    sys.true_coefficients = xi;
    sys.library_spec = spec;
    sys.rhs = [terms, spec, coeffs = xi.xi, n, nc](const Vector& state, const Vector& control) {
        Vector vars(n + nc);
        vars.head(n) = state;
        if (nc > 0) vars.tail(nc) = control;
        const Vector row = evaluate_library_row(vars, spec, terms);
        return Vector(coeffs.transpose() * row);
    };
    return sys;
}

double interpolated_quantile(std::vector<double>& values, double level) {
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    if (k == 1) return values[0];
    const double pos = level * static_cast<double>(k - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= k) return values[k - 1];
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

// Integrates the model, truncating at the first non-finite state.
Matrix integrate_model(const SystemDefinition& sys, const Vector& u0, int steps, double dt) {
    Matrix traj(steps + 1, sys.state_dim);
    traj.row(0) = u0;
    Vector state = u0;
    const Vector no_control = Vector::Zero(0);
    for (int k = 0; k < steps; ++k) {
        state = rk4_step(sys.rhs, state, no_control, dt);
        if (!state.allFinite()) return traj.topRows(k + 1);
        traj.row(k + 1) = state;
    }
    return traj;
}

std::vector<int> sample_members(int q, int k, std::mt19937_64& rng) {
    std::vector<int> pool(q);
    for (int i = 0; i < q; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, q - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

ForecastEnsemble ensemble_forecast(const EnsembleResult& result, const LibrarySpec& spec,
                                   const std::vector<std::string>& state_names, const Vector& u0,
                                   double T, double dt, int n_draws, int draw_size, double coverage,
                                   std::uint64_t seed) {
    if (coverage <= 0.0 || coverage >= 1.0) throw ParameterError("coverage must be in (0,1)");
    if (n_draws < 1) throw ParameterError("n_draws must be positive");
    const int q = result.members();
    if (draw_size < 1 || draw_size > q) throw ParameterError("draw_size must be in [1, q]");
    if (dt <= 0.0 || T < dt) throw ParameterError("invalid forecast horizon");

    const int steps = static_cast<int>(std::floor(T / dt + 1e-12));
    const int n = static_cast<int>(result.coefficient_stack[0].cols());

    ForecastEnsemble fc;
    fc.dt = dt;
    CoefficientMatrix agg = result.aggregated;
    agg.state_labels = state_names;
    fc.point_forecast = integrate_model(model_rhs(agg, spec), u0, steps, dt);
    fc.trajectories.resize(n_draws);

    parallel_for(n_draws, [&](int i) {
        auto rng = make_engine(seed, static_cast<std::uint64_t>(i));
        const auto members = sample_members(q, draw_size, rng);
        Matrix mean_xi = Matrix::Zero(result.coefficient_stack[0].rows(), n);
        for (int m : members) mean_xi += result.coefficient_stack[m];
        mean_xi /= static_cast<double>(draw_size);
        CoefficientMatrix cm;
        cm.xi = mean_xi;
        cm.term_labels = result.aggregated.term_labels;
        cm.state_labels = state_names;
        fc.trajectories[i] = integrate_model(model_rhs(cm, spec), u0, steps, dt);
    });

    fc.bands.lower.resize(steps + 1, n);
    fc.bands.median.resize(steps + 1, n);
    fc.bands.upper.resize(steps + 1, n);
    fc.valid_draws.assign(steps + 1, 0);
    const double lo_level = (1.0 - coverage) / 2.0;
    const double hi_level = (1.0 + coverage) / 2.0;

    bool truncated = false;
    std::vector<double> vals;
    for (int t = 0; t <= steps; ++t) {
        int valid = 0;
        for (const auto& traj : fc.trajectories) {
            if (traj.rows() > t) ++valid;
        }
        fc.valid_draws[t] = valid;
        if (valid < n_draws) truncated = true;
        for (int s = 0; s < n; ++s) {
            if (valid == 0) {
                fc.bands.lower(t, s) = fc.bands.median(t, s) = fc.bands.upper(t, s) =
                    std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            vals.clear();
            for (const auto& traj : fc.trajectories) {
                if (traj.rows() > t) vals.push_back(traj(t, s));
            }
            fc.bands.lower(t, s) = interpolated_quantile(vals, lo_level);
            fc.bands.median(t, s) = interpolated_quantile(vals, 0.5);
            fc.bands.upper(t, s) = interpolated_quantile(vals, hi_level);
        }
    }
    if (truncated) {
        fc.warnings.push_back("some draws diverged before the horizon; coverage degrades there");
    }
    return fc;
}

}  // namespace esindy
