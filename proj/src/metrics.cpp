#include "esindy/metrics.hpp"

#include <bit>
#include <cmath>

#include "esindy/differentiation.hpp"
#include "esindy/parallel.hpp"
#include "esindy/rng.hpp"

namespace esindy {

double coefficient_error(const Matrix& true_xi, const Matrix& identified_xi) {
    if (true_xi.rows() != identified_xi.rows() || true_xi.cols() != identified_xi.cols()) {
        throw ShapeError("coefficient_error: shape mismatch");
    }
    const double denom = true_xi.norm();
    if (denom == 0.0) throw NumericError("coefficient_error undefined for a zero true matrix");
    return (true_xi - identified_xi).norm() / denom;
}

bool support_success(const Matrix& true_xi, const Matrix& identified_xi) {
    if (true_xi.rows() != identified_xi.rows() || true_xi.cols() != identified_xi.cols()) {
        throw ShapeError("support_success: shape mismatch");
    }
    for (long i = 0; i < true_xi.rows(); ++i) {
        for (long j = 0; j < true_xi.cols(); ++j) {
            if ((true_xi(i, j) != 0.0) != (identified_xi(i, j) != 0.0)) return false;
        }
    }
    return true;
}

std::string method_name(FitMethod m) {
    switch (m) {
        case FitMethod::sindy:
            return "sindy";
        case FitMethod::bagging:
            return "bagging";
        case FitMethod::bragging:
            return "bragging";
        case FitMethod::library_bagging:
            return "library-bagging";
        case FitMethod::stability_selection:
            return "stability-selection";
    }
    return "unknown";
}

FitMethod method_from_name(const std::string& name) {
    if (name == "sindy") return FitMethod::sindy;
    if (name == "bagging") return FitMethod::bagging;
    if (name == "bragging") return FitMethod::bragging;
    if (name == "library-bagging" || name == "library") return FitMethod::library_bagging;
    if (name == "stability-selection" || name == "stability") return FitMethod::stability_selection;
    throw ParameterError("unknown method '" + name + "'");
}

Matrix fit_by_method(FitMethod method, const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                     const RegressionConfig& reg, const EnsembleConfig& ens) {
    switch (method) {
        case FitMethod::sindy:
            return sparsify_system(theta.theta, ut.values, reg, nullptr);
        case FitMethod::bagging:
            return bagging(theta, ut, reg, ens).aggregated.xi;
        case FitMethod::bragging:
            return bragging(theta, ut, reg, ens).aggregated.xi;
        case FitMethod::library_bagging:
            return library_bagging(theta, ut, reg, ens).aggregated.xi;
        case FitMethod::stability_selection:
            return stability_selection(theta, ut, reg, ens, false, nullptr).xi;
    }
    throw ParameterError("unknown fit method");
}

namespace {

std::uint64_t trial_seed(std::uint64_t master, double noise, double length, int trial) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(noise));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(length));
    h = mix64(h ^ static_cast<std::uint64_t>(trial));
    return h;
}

}  // namespace

SweepReport sweep(const SystemDefinition& system, const SweepGrid& grid, int n_realizations,
                  std::uint64_t seed, const SweepProtocol& protocol) {
    if (grid.noise_levels.empty() || grid.data_lengths.empty() || grid.methods.empty()) {
        throw ParameterError("sweep grid must be nonempty");
    }
    if (n_realizations < 1) throw ParameterError("n_realizations must be positive");

    Vector u0 = protocol.u0;
    if (u0.size() == 0) {
        if (system.name == "lorenz" || system.name == "forced_lorenz") {
            u0 = Vector(3);
            u0 << -8.0, 7.0, 27.0;
        } else {
            throw ParameterError("sweep protocol needs an initial condition for " + system.name);
        }
    }

    SweepReport report;
    for (double length : grid.data_lengths) {
        // one clean trajectory per data length, shared across noise levels
        const DataMatrix clean = simulate_ode(system, u0, length, protocol.dt);
        for (double noise : grid.noise_levels) {
            for (FitMethod method : grid.methods) {
                SweepCell cell;
                cell.noise = noise;
                cell.length = length;
                cell.method = method;
                cell.realizations = n_realizations;
                std::vector<double> ec(n_realizations, 0.0);
                std::vector<int> ok(n_realizations, 0);
                std::vector<int> failed(n_realizations, 0);
                parallel_for(n_realizations, [&](int trial) {
                    const std::uint64_t ts = trial_seed(seed, noise, length, trial);
                    try {
                        const DataMatrix noisy = add_noise(clean, noise, ts);
                        const auto ut = finite_difference_time(noisy);
                        const auto theta = build_library(noisy, system.library_spec);
                        EnsembleConfig ens = protocol.ensemble;
                        ens.seed = mix64(ts);
                        if (method == FitMethod::library_bagging) {
                            ens.ip_threshold = protocol.library_bagging_tol;
                        }
                        const Matrix xi = fit_by_method(method, theta, ut, protocol.regression, ens);
                        ec[trial] = coefficient_error(system.true_coefficients.xi, xi);
                        ok[trial] = support_success(system.true_coefficients.xi, xi) ? 1 : 0;
                    } catch (const std::exception&) {
                        failed[trial] = 1;
                        ec[trial] = 1.0;  // null-model error
                    }
                });
                double sum_ec = 0.0;
                int n_ok = 0, n_fail = 0;
                for (int t = 0; t < n_realizations; ++t) {
                    sum_ec += ec[t];
                    n_ok += ok[t];
                    n_fail += failed[t];
                }
                cell.success_rate = static_cast<double>(n_ok) / n_realizations;
                cell.mean_coefficient_error = sum_ec / n_realizations;
                cell.failures = n_fail;
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

}  // namespace esindy
