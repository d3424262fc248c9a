#include "esindy/weak.hpp"

#include <cmath>

#include "esindy/kernels.hpp"
#include "esindy/parallel.hpp"
#include "esindy/rng.hpp"

namespace esindy {

namespace {

// (1 - z^2)^p as a coefficient vector in z.
std::vector<double> bump_polynomial(int p) {
    std::vector<double> coef(2 * p + 1, 0.0);
    double binom = 1.0;
    for (int i = 0; i <= p; ++i) {
        coef[2 * i] = (i % 2 == 0 ? 1.0 : -1.0) * binom;
        binom = binom * (p - i) / (i + 1);
    }
    return coef;
}

std::vector<double> poly_derivative(const std::vector<double>& coef) {
    if (coef.size() <= 1) return {0.0};
    std::vector<double> out(coef.size() - 1);
    for (std::size_t i = 0; i + 1 < coef.size(); ++i) out[i] = (i + 1) * coef[i + 1];
    return out;
}

double poly_eval(const std::vector<double>& coef, double z) {
    double v = 0.0;
    for (std::size_t i = coef.size(); i-- > 0;) v = v * z + coef[i];
    return v;
}

}  // namespace

std::vector<double> test_function_profile(int extent, int p, int deriv_order, double spacing) {
    if (extent < 2) throw ParameterError("test-function domain needs at least 2 grid intervals");
    if (p < 1) throw ParameterError("test_function_degree must be positive");
    std::vector<double> coef = bump_polynomial(p);
    for (int r = 0; r < deriv_order; ++r) coef = poly_derivative(coef);
    // z = -1 + 2 i / extent; d/dx = (2 / (extent*spacing)) d/dz
    const double map = std::pow(2.0 / (extent * spacing), deriv_order);
    std::vector<double> out(extent + 1);
    for (int i = 0; i <= extent; ++i) {
        const double z = -1.0 + 2.0 * i / extent;
        out[i] = map * poly_eval(coef, z);
    }
    return out;
}

namespace {

// trapezoid-weighted profile including the grid spacing factor
std::vector<double> weighted_profile(int extent, int p, int deriv_order, double spacing) {
    std::vector<double> w = test_function_profile(extent, p, deriv_order, spacing);
    for (auto& v : w) v *= spacing;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace

WeakSystem assemble_weak_system(const Field& field, const LibrarySpec& spec, const WeakConfig& cfg) {
    field.validate();
    if (!spec.trig_frequencies.empty()) throw SpecError("trig terms are not supported in the weak form");
    const auto terms = enumerate_terms(spec, {"u"}, /*pde_mode=*/true);
    const int m = field.time_points();
    const int s = field.space_points();
    const int p = cfg.test_function_degree;

    int max_deriv = 1;  // the time integration by parts needs p >= 1 anyway
    int max_power = 1;
    for (const auto& t : terms) {
        if (t.kind == TermKind::derivative) max_deriv = std::max(max_deriv, t.deriv_order);
        if (t.kind == TermKind::monomial) max_power = std::max(max_power, t.exponents[0]);
        if (t.kind == TermKind::mixed) {
            max_deriv = std::max(max_deriv, 1);
            max_power = std::max(max_power, t.power + 1);
        }
    }
    if (p < max_deriv + 1) {
        throw SpecError("test_function_degree must be at least the max derivative order + 1");
    }

    const int ht = cfg.domain_time_extent > 0 ? cfg.domain_time_extent : std::max(2, (m - 1) / 8);
    const int hx = cfg.domain_space_extent > 0 ? cfg.domain_space_extent : std::max(2, (s - 1) / 8);
    if (ht < 2 || hx < 2) throw ParameterError("weak domains need at least 2 grid intervals per axis");
    if (ht > m - 1 || hx > s - 1) throw ParameterError("weak domain does not fit inside the grid");
    if (cfg.n_domains < 1) throw ParameterError("need at least one integration domain");

    // row-major copies of u^a so every domain row is a contiguous dot
    std::vector<std::vector<double>> upow(max_power + 1);
    upow[1].resize(static_cast<std::size_t>(m) * s);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < s; ++j) upow[1][static_cast<std::size_t>(i) * s + j] = field.values(i, j);
    }
    for (int a = 2; a <= max_power; ++a) {
        upow[a].resize(upow[1].size());
        kernels::mul(upow[a - 1].data(), upow[1].data(), upow[a].data(), upow[1].size());
    }

    // shared profiles: all domains have the same extents
    const std::vector<double> psi = weighted_profile(ht, p, 0, field.dt);
    const std::vector<double> psi_t = weighted_profile(ht, p, 1, field.dt);
    std::vector<std::vector<double>> phi(max_deriv + 1);
    for (int r = 0; r <= max_deriv; ++r) phi[r] = weighted_profile(hx, p, r, field.dx);

    WeakSystem sys;
    sys.domain_time_extent = ht;
    sys.domain_space_extent = hx;
    sys.test_function_degree = p;
    for (const auto& t : terms) sys.term_labels.push_back(t.label);

    auto rng = make_engine(cfg.seed, 0x7ea1ULL);
    std::uniform_int_distribution<int> pick_t(0, m - 1 - ht);
    std::uniform_int_distribution<int> pick_x(0, s - 1 - hx);
    sys.domain_offsets.reserve(cfg.n_domains);
    for (int k = 0; k < cfg.n_domains; ++k) {
        sys.domain_offsets.emplace_back(pick_t(rng), pick_x(rng));
    }

    const int D = static_cast<int>(terms.size());
    sys.Q.resize(cfg.n_domains, D);
    sys.q0.resize(cfg.n_domains);

    parallel_for(cfg.n_domains, [&](int k) {
        const auto [t0, x0] = sys.domain_offsets[k];
        // sum_i w(i) * dot(g_row(t0+i) restricted to [x0, x0+hx], phi_r)
        auto integrate = [&](const std::vector<double>& g, const std::vector<double>& time_w,
                             const std::vector<double>& space_w) {
            double acc = 0.0;
            for (int i = 0; i <= ht; ++i) {
                const double* row = g.data() + static_cast<std::size_t>(t0 + i) * s + x0;
                acc += time_w[i] * kernels::dot(row, space_w.data(), space_w.size());
            }
            return acc;
        };

        sys.q0[k] = -integrate(upow[1], psi_t, phi[0]);
        for (int d = 0; d < D; ++d) {
            const Term& t = terms[d];
            double v = 0.0;
            switch (t.kind) {
                case TermKind::constant: {
                    double sw = 0.0, tw = 0.0;
                    for (double x : phi[0]) sw += x;
                    for (double x : psi) tw += x;
                    v = sw * tw;
                    break;
                }
                case TermKind::monomial:
                    v = integrate(upow[t.exponents[0]], psi, phi[0]);
                    break;
                case TermKind::derivative: {
                    const double sign = t.deriv_order % 2 == 0 ? 1.0 : -1.0;
                    v = sign * integrate(upow[1], psi, phi[t.deriv_order]);
                    break;
                }
                case TermKind::mixed:
                    v = -integrate(upow[t.power + 1], psi, phi[1]) / (t.power + 1);
                    break;
                default:
                    throw SpecError("unsupported term kind in the weak form");
            }
            sys.Q(k, d) = v;
        }
    });
    return sys;
}

CoefficientMatrix weak_single_fit(const WeakSystem& system, const RegressionConfig& reg) {
    CoefficientMatrix cm;
    Matrix target(system.q0.size(), 1);
    target.col(0) = system.q0;
    cm.xi = sparsify_system(system.Q, target, reg, nullptr);
    cm.term_labels = system.term_labels;
    cm.state_labels = {"u_t"};
    return cm;
}

EnsembleResult discover_pde(const Field& field, const LibrarySpec& spec, const WeakConfig& wcfg,
                            const RegressionConfig& reg, const EnsembleConfig& ens) {
    const WeakSystem sys = assemble_weak_system(field, spec, wcfg);
    EvaluatedLibrary lib;
    lib.spec = spec;
    lib.theta = sys.Q;
    lib.term_labels = sys.term_labels;
    DerivativeMatrix target;
    target.method_tag = "weak";
    target.values.resize(sys.q0.size(), 1);
    target.values.col(0) = sys.q0;
    EnsembleResult result = library_bagging(lib, target, reg, ens);
    result.aggregated.state_labels = {"u_t"};
    return result;
}

}  // namespace esindy
