#include "esindy/systems.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "esindy/io.hpp"
#include "esindy/kernels.hpp"
#include "esindy/rng.hpp"

#ifndef ESINDY_DEFAULT_DATA_DIR
#define ESINDY_DEFAULT_DATA_DIR "data"
#endif

namespace esindy {

Vector rk4_step(const std::function<Vector(const Vector&, const Vector&)>& rhs, const Vector& state,
                const Vector& control, double dt) {
    const Vector k1 = rhs(state, control);
    const Vector k2 = rhs(state + 0.5 * dt * k1, control);
    const Vector k3 = rhs(state + 0.5 * dt * k2, control);
    const Vector k4 = rhs(state + dt * k3, control);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DataMatrix simulate_ode(const SystemDefinition& sys, const Vector& u0, double T, double dt,
                        const std::vector<Vector>& control) {
    if (dt <= 0.0) throw ParameterError("dt must be positive");
    if (T < dt) throw ParameterError("T must be at least dt");
    if (u0.size() != sys.state_dim) throw ShapeError("initial condition dimension mismatch");
    const int steps = static_cast<int>(std::floor(T / dt + 1e-12));
    if (sys.control_dim > 0 && static_cast<int>(control.size()) < steps) {
        throw ParameterError("control sequence shorter than the step count");
    }

    DataMatrix out;
    out.dt = dt;
    out.names = sys.state_names;
    out.values.resize(steps + 1, sys.state_dim);

    const Vector no_control = Vector::Zero(std::max(0, sys.control_dim));
    Vector state = u0;
    out.values.row(0) = state;
    for (int k = 0; k < steps; ++k) {
        const Vector& u = sys.control_dim > 0 ? control[k] : no_control;
        state = rk4_step(sys.rhs, state, u, dt);
        if (!state.allFinite()) {
            throw DivergenceError(sys.name + " diverged at step " + std::to_string(k + 1));
        }
        out.values.row(k + 1) = state;
    }
    return out;
}

namespace {

// Coefficient matrix over the degree-2 + constant library from (term label ->
// per-state coefficients).
CoefficientMatrix coefficients_from_map(const LibrarySpec& spec,
                                        const std::vector<std::string>& var_names,
                                        const std::vector<std::string>& state_names,
                                        const std::map<std::string, std::vector<double>>& entries) {
    const auto terms = enumerate_terms(spec, var_names, false);
    CoefficientMatrix cm;
    cm.xi = Matrix::Zero(static_cast<int>(terms.size()), static_cast<int>(state_names.size()));
    cm.state_labels = state_names;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        cm.term_labels.push_back(terms[t].label);
        auto it = entries.find(terms[t].label);
        if (it == entries.end()) continue;
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            cm.xi(static_cast<int>(t), static_cast<int>(i)) = it->second[i];
        }
    }
    return cm;
}

constexpr double kSigma = 10.0;
constexpr double kRho = 28.0;
constexpr double kBeta = 8.0 / 3.0;

}  // namespace

SystemDefinition lorenz() {
    SystemDefinition sys;
    sys.name = "lorenz";
    sys.state_dim = 3;
    sys.state_names = {"x", "y", "z"};
    sys.parameters = {{"sigma", kSigma}, {"rho", kRho}, {"beta", kBeta}};
    sys.rhs = [](const Vector& s, const Vector&) {
        Vector d(3);
        d[0] = kSigma * (s[1] - s[0]);
        d[1] = s[0] * (kRho - s[2]) - s[1];
        d[2] = s[0] * s[1] - kBeta * s[2];
        return d;
    };
    sys.library_spec.polynomial_degree = 2;
    sys.library_spec.include_constant = true;
    sys.true_coefficients = coefficients_from_map(
        sys.library_spec, sys.state_names, sys.state_names,
        {{"x", {-kSigma, kRho, 0.0}},
         {"y", {kSigma, -1.0, 0.0}},
         {"z", {0.0, 0.0, -kBeta}},
         {"x*z", {0.0, -1.0, 0.0}},
         {"x*y", {0.0, 0.0, 1.0}}});
    return sys;
}

SystemDefinition lotka_volterra(double a, double b, double c, double d) {
    SystemDefinition sys;
    sys.name = "lotka_volterra";
    sys.state_dim = 2;
    sys.state_names = {"x", "y"};
    sys.parameters = {{"a", a}, {"b", b}, {"c", c}, {"d", d}};
    sys.rhs = [a, b, c, d](const Vector& s, const Vector&) {
        Vector out(2);
        out[0] = a * s[0] - b * s[0] * s[1];
        out[1] = -c * s[1] + d * s[0] * s[1];
        return out;
    };
    sys.library_spec.polynomial_degree = 2;
    sys.library_spec.include_constant = true;
    sys.true_coefficients = coefficients_from_map(sys.library_spec, sys.state_names, sys.state_names,
                                                  {{"x", {a, 0.0}}, {"y", {0.0, -c}}, {"x*y", {-b, d}}});
    return sys;
}

SystemDefinition forced_lorenz() {
    SystemDefinition sys;
    sys.name = "forced_lorenz";
    sys.state_dim = 3;
    sys.control_dim = 1;
    sys.state_names = {"x", "y", "z"};
    sys.parameters = {{"sigma", kSigma}, {"rho", kRho}, {"beta", kBeta}};
    sys.rhs = [](const Vector& s, const Vector& u) {
        Vector d(3);
        d[0] = kSigma * (s[1] - s[0]) + u[0];
        d[1] = s[0] * (kRho - s[2]) - s[1];
        d[2] = s[0] * s[1] - kBeta * s[2];
        return d;
    };
    sys.library_spec.polynomial_degree = 2;
    sys.library_spec.include_constant = true;
    sys.library_spec.control_inputs = 1;
    const auto var_names = library_variable_names(sys.state_names, 1);
    sys.true_coefficients = coefficients_from_map(
        sys.library_spec, var_names, sys.state_names,
        {{"x", {-kSigma, kRho, 0.0}},
         {"y", {kSigma, -1.0, 0.0}},
         {"z", {0.0, 0.0, -kBeta}},
         {"u", {1.0, 0.0, 0.0}},
         {"x*z", {0.0, -1.0, 0.0}},
         {"x*y", {0.0, 0.0, 1.0}}});
    return sys;
}

double trajectory_rms(const Matrix& values) {
    const std::size_t total = static_cast<std::size_t>(values.size());
    if (total == 0) return 0.0;
    return std::sqrt(kernels::sumsq(values.data(), total) / static_cast<double>(total));
}

DataMatrix add_noise(const DataMatrix& data, double sigma, std::uint64_t seed, NoiseScaling scaling) {
    if (sigma < 0.0) throw ParameterError("sigma must be non-negative");
    DataMatrix out = data;
    if (sigma == 0.0) return out;
    const double rms = trajectory_rms(data.values);
    double stddev = 0.0;
    if (scaling == NoiseScaling::percent_of_rms) {
        stddev = sigma * rms;
    } else {
        if (rms <= 0.0) throw ParameterError("variance_over_rms scaling needs a nonzero signal");
        stddev = std::sqrt(sigma / rms);
    }
    auto rng = make_engine(seed, 0);
    std::normal_distribution<double> gauss(0.0, stddev);
    double* p = out.values.data();
    for (long i = 0; i < out.values.size(); ++i) p[i] += gauss(rng);
    return out;
}

DataMatrix load_hudson_bay() {
    namespace fs = std::filesystem;
    std::string dir = ESINDY_DEFAULT_DATA_DIR;
    if (const char* env = std::getenv("ESINDY_DATA_DIR")) dir = env;
    const fs::path path = fs::path(dir) / "hudson_bay_pelts.csv";
    if (!fs::exists(path)) throw IngestionError("Hudson Bay dataset not found at " + path.string());

    CsvTable table = read_csv(path.string());
    if (table.columns.size() != 3 || table.columns[0] != "year") {
        throw IngestionError("unexpected Hudson Bay CSV layout in " + path.string());
    }
    if (table.values.rows() != 21) {
        throw IngestionError("Hudson Bay dataset must have 21 rows (1900-1920)");
    }
    if (table.values(0, 0) != 1900.0 || table.values(20, 0) != 1920.0) {
        throw IngestionError("Hudson Bay dataset years must span 1900-1920");
    }
    if ((table.values.rightCols(2).array() <= 0.0).any()) {
        throw IngestionError("Hudson Bay pelt counts must be positive");
    }

    DataMatrix out;
    out.dt = 1.0;
    out.names = {"hare", "lynx"};
    out.values = table.values.rightCols(2);
    return out;
}

}  // namespace esindy
