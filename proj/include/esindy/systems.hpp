#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "esindy/library.hpp"
#include "esindy/types.hpp"

namespace esindy {

// Ground-truth dynamical system with its coefficients declared relative to a
// library spec, so identified models can be scored against the truth.
struct SystemDefinition {
    std::string name;
    int state_dim = 0;
    int control_dim = 0;
    std::function<Vector(const Vector& state, const Vector& control)> rhs;
    CoefficientMatrix true_coefficients;
    LibrarySpec library_spec;
    std::vector<std::string> state_names;
    std::map<std::string, double> parameters;
};

// Classical fixed-step RK4. Control, when present, is held constant over each
// step (zero-order hold); the sequence needs one value per step. Produces
// floor(T/dt)+1 samples. Throws DivergenceError naming the step on blow-up.
DataMatrix simulate_ode(const SystemDefinition& sys, const Vector& u0, double T, double dt,
                        const std::vector<Vector>& control = {});

// Single RK4 step, exposed for the forecast/control loops.
Vector rk4_step(const std::function<Vector(const Vector&, const Vector&)>& rhs, const Vector& state,
                const Vector& control, double dt);

SystemDefinition lorenz();
SystemDefinition lotka_volterra(double a, double b, double c, double d);
SystemDefinition forced_lorenz();

enum class NoiseScaling {
    // standard deviation = sigma * rms(u); "2.5% noise" means sigma = 0.025
    percent_of_rms,
    // literal reading of the variance formula: variance = sigma / rms(u)
    variance_over_rms,
};

DataMatrix add_noise(const DataMatrix& data, double sigma, std::uint64_t seed,
                     NoiseScaling scaling = NoiseScaling::percent_of_rms);

// Root mean square over every entry of the trajectory.
double trajectory_rms(const Matrix& values);

// Bundled Hudson Bay Company lynx/hare pelt counts, 1900-1920, thousands of
// pelts, dt = 1 year. Looks in ESINDY_DATA_DIR, then the build-time data dir.
DataMatrix load_hudson_bay();

// --- spectral PDE benchmarks (periodic domain, ETDRK4 time stepping) ---

enum class PdeName { burgers, kdv, kuramoto_sivashinsky };

struct PdeGrid {
    double domain_length = 0.0;
    int modes = 0;  // spatial grid points (power of two recommended)
};

struct PdeRun {
    double T = 0.0;        // final time
    double dt = 0.0;       // solver step
    int save_every = 1;    // field sampling cadence; field dt = dt*save_every
};

// Simulates u_t = -u u_x (Burgers, mild spectral filtering), u_t = -6 u u_x -
// u_xxx (KdV) or u_t = -u u_x - u_xx - u_xxxx (Kuramoto-Sivashinsky) with the
// default initial condition, or a custom one.
Field simulate_pde(PdeName name, const PdeGrid& grid, const PdeRun& run,
                   const std::function<double(double)>& initial = {});

// True PDE coefficients relative to the spec used by the discovery benchmarks.
CoefficientMatrix pde_true_coefficients(PdeName name, const LibrarySpec& spec);

}  // namespace esindy
