#include <fftw3.h>

#include <cmath>
#include <complex>
#include <vector>

#include "esindy/systems.hpp"

namespace esindy {

namespace {

using Complex = std::complex<double>;

struct Spectral {
    int n;
    int nk;
    double length;
    std::vector<double> k;  // wave numbers for the rfft layout
    std::vector<double> real_buf;
    std::vector<Complex> spec_buf;
    fftw_plan fwd;
    fftw_plan inv;

    Spectral(int n_, double length_) : n(n_), nk(n_ / 2 + 1), length(length_) {
        real_buf.resize(n);
        spec_buf.resize(nk);
        k.resize(nk);
        for (int j = 0; j < nk; ++j) k[j] = 2.0 * M_PI * j / length;
        fwd = fftw_plan_dft_r2c_1d(n, real_buf.data(),
                                   reinterpret_cast<fftw_complex*>(spec_buf.data()), FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec_buf.data()),
                                   real_buf.data(), FFTW_ESTIMATE);
    }
    ~Spectral() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    std::vector<Complex> to_spectral(const std::vector<double>& u) {
        std::copy(u.begin(), u.end(), real_buf.begin());
        fftw_execute(fwd);
        return spec_buf;
    }
    std::vector<double> to_physical(const std::vector<Complex>& v) {
        std::copy(v.begin(), v.end(), spec_buf.begin());
        fftw_execute(inv);
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) u[i] = real_buf[i] / n;
        return u;
    }
};

// phi-function coefficients evaluated by the mean over a unit circle around
// h*L, which is exact for entire functions and avoids cancellation near 0.
struct EtdCoefficients {
    std::vector<Complex> E, E2, Q, f1, f2, f3;
};

EtdCoefficients etdrk4_coefficients(const std::vector<Complex>& L, double h) {
    const int nk = static_cast<int>(L.size());
    const int M = 32;
    EtdCoefficients c;
    c.E.resize(nk);
    c.E2.resize(nk);
    c.Q.assign(nk, 0.0);
    c.f1.assign(nk, 0.0);
    c.f2.assign(nk, 0.0);
    c.f3.assign(nk, 0.0);
    for (int j = 0; j < nk; ++j) {
        const Complex hL = h * L[j];
        c.E[j] = std::exp(hL);
        c.E2[j] = std::exp(0.5 * hL);
        Complex q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
        for (int p = 0; p < M; ++p) {
            const Complex r = std::polar(1.0, M_PI * (p + 0.5) / M * 2.0 - M_PI);
            const Complex z = hL + r;
            const Complex ez = std::exp(z);
            const Complex z2 = z * z;
            const Complex z3 = z2 * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
            f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
            f3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
        }
        c.Q[j] = h * q / static_cast<double>(M);
        c.f1[j] = h * f1 / static_cast<double>(M);
        c.f2[j] = h * f2 / static_cast<double>(M);
        c.f3[j] = h * f3 / static_cast<double>(M);
    }
    return c;
}

}  // namespace

Field simulate_pde(PdeName name, const PdeGrid& grid, const PdeRun& run,
                   const std::function<double(double)>& initial) {
    if (grid.modes < 16) throw ParameterError("PDE grid needs at least 16 points");
    if (grid.domain_length <= 0.0) throw ParameterError("domain length must be positive");
    if (run.dt <= 0.0 || run.T < run.dt) throw ParameterError("invalid time stepping parameters");
    if (run.save_every < 1) throw ParameterError("save_every must be at least 1");

    const int n = grid.modes;
    const double L = grid.domain_length;
    Spectral sp(n, L);

    std::vector<double> u0(n);
    for (int i = 0; i < n; ++i) {
        const double x = L * i / n;
        if (initial) {
            u0[i] = initial(x);
        } else {
            switch (name) {
                case PdeName::burgers:
                    u0[i] = std::sin(2.0 * M_PI * x / L);
                    break;
                case PdeName::kdv: {
                    const double k1 = 0.75, k2 = 0.45;
                    const double a1 = std::cosh(k1 * (x - 0.25 * L));
                    const double a2 = std::cosh(k2 * (x - 0.55 * L));
                    u0[i] = 2.0 * k1 * k1 / (a1 * a1) + 2.0 * k2 * k2 / (a2 * a2);
                    break;
                }
                case PdeName::kuramoto_sivashinsky:
                    u0[i] = std::cos(2.0 * M_PI * x / L) + 0.1 * std::cos(4.0 * M_PI * x / L);
                    break;
            }
        }
    }

    // linear symbol and advection coefficient of -c u u_x
    const int nk = n / 2 + 1;
    std::vector<Complex> Lsym(nk, 0.0);
    double advect = 1.0;
    for (int j = 0; j < nk; ++j) {
        const double k = sp.k[j];
        switch (name) {
            case PdeName::burgers:
                Lsym[j] = 0.0;
                break;
            case PdeName::kdv:
                Lsym[j] = Complex(0.0, k * k * k);  // -u_xxx
                advect = 6.0;
                break;
            case PdeName::kuramoto_sivashinsky:
                Lsym[j] = k * k - k * k * k * k;  // -u_xx - u_xxxx
                break;
        }
    }

    const double kmax = sp.k[nk - 1];
    double umax = 0.0;
    for (double v : u0) umax = std::max(umax, std::abs(v));
    if (run.dt * kmax * advect * std::max(umax, 1e-12) > 4.0) {
        throw DivergenceError("time step exceeds the advective stability bound for this grid");
    }

    const EtdCoefficients c = etdrk4_coefficients(Lsym, run.dt);

    // 2/3-rule dealias mask; Burgers additionally applies a smooth exponential
    // filter as shock regularization.
    std::vector<double> dealias(nk, 1.0);
    std::vector<double> filter(nk, 1.0);
    for (int j = 0; j < nk; ++j) {
        if (sp.k[j] > (2.0 / 3.0) * kmax) dealias[j] = 0.0;
        filter[j] = std::exp(-36.0 * std::pow(sp.k[j] / kmax, 36));
    }
    const bool use_filter = name == PdeName::burgers;

    auto nonlinear = [&](const std::vector<Complex>& v) {
        std::vector<double> u = sp.to_physical(v);
        for (int i = 0; i < n; ++i) u[i] *= u[i];
        std::vector<Complex> w = sp.to_spectral(u);
        for (int j = 0; j < nk; ++j) {
            w[j] *= Complex(0.0, -0.5 * advect * sp.k[j]) * dealias[j];
        }
        return w;
    };

    const int steps = static_cast<int>(std::llround(run.T / run.dt));
    const int samples = steps / run.save_every + 1;
    Field field;
    field.dt = run.dt * run.save_every;
    field.dx = L / n;
    field.values.resize(samples, n);
    for (int i = 0; i < n; ++i) field.values(0, i) = u0[i];

    std::vector<Complex> v = sp.to_spectral(u0);
    int row = 1;
    for (int step = 1; step <= steps; ++step) {
        const std::vector<Complex> Nv = nonlinear(v);
        std::vector<Complex> a(nk), b(nk), cc(nk);
        for (int j = 0; j < nk; ++j) a[j] = c.E2[j] * v[j] + c.Q[j] * Nv[j];
        const std::vector<Complex> Na = nonlinear(a);
        for (int j = 0; j < nk; ++j) b[j] = c.E2[j] * v[j] + c.Q[j] * Na[j];
        const std::vector<Complex> Nb = nonlinear(b);
        for (int j = 0; j < nk; ++j) cc[j] = c.E2[j] * a[j] + c.Q[j] * (2.0 * Nb[j] - Nv[j]);
        const std::vector<Complex> Nc = nonlinear(cc);
        for (int j = 0; j < nk; ++j) {
            v[j] = c.E[j] * v[j] + c.f1[j] * Nv[j] + 2.0 * c.f2[j] * (Na[j] + Nb[j]) + c.f3[j] * Nc[j];
            if (use_filter) v[j] *= filter[j];
        }
        if (step % run.save_every == 0) {
            const std::vector<double> u = sp.to_physical(v);
            for (int i = 0; i < n; ++i) {
                if (!std::isfinite(u[i])) {
                    throw DivergenceError("PDE solution lost finiteness at step " + std::to_string(step));
                }
                field.values(row, i) = u[i];
            }
            ++row;
        }
    }
    return field;
}

CoefficientMatrix pde_true_coefficients(PdeName name, const LibrarySpec& spec) {
    const auto terms = enumerate_terms(spec, {"u"}, true);
    CoefficientMatrix cm;
    cm.xi = Matrix::Zero(static_cast<int>(terms.size()), 1);
    cm.state_labels = {"u_t"};
    auto set = [&](const std::string& label, double value) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (terms[t].label == label) {
                cm.xi(static_cast<int>(t), 0) = value;
                return;
            }
        }
        throw SpecError("library spec is missing the true term " + label);
    };
    for (auto& t : terms) cm.term_labels.push_back(t.label);
    switch (name) {
        case PdeName::burgers:
            set("u*u_x", -1.0);
            break;
        case PdeName::kdv:
            set("u*u_x", -6.0);
            set("u_xxx", -1.0);
            break;
        case PdeName::kuramoto_sivashinsky:
            set("u*u_x", -1.0);
            set("u_xx", -1.0);
            set("u_xxxx", -1.0);
            break;
    }
    return cm;
}

}  // namespace esindy
