#include "esindy/library.hpp"

#include <cmath>
#include <cstdio>

#include "esindy/kernels.hpp"

namespace esindy {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string monomial_label(const std::vector<int>& exponents, const std::vector<std::string>& names) {
    std::string label;
    for (std::size_t v = 0; v < exponents.size(); ++v) {
        if (exponents[v] == 0) continue;
        if (!label.empty()) label += "*";
        label += names[v];
        if (exponents[v] > 1) label += "^" + std::to_string(exponents[v]);
    }
    return label.empty() ? "1" : label;
}

std::string derivative_label(const std::string& var, int order) {
    std::string label = var + "_";
    for (int i = 0; i < order; ++i) label += "x";
    return label;
}

// Graded-lexicographic monomial exponents for total degree deg over nv vars.
void append_monomials_of_degree(int nv, int deg, std::vector<std::vector<int>>& out) {
    std::vector<int> combo(deg, 0);  // nondecreasing var indices
    while (true) {
        std::vector<int> exps(nv, 0);
        for (int idx : combo) exps[idx]++;
        out.push_back(exps);
        int pos = deg - 1;
        while (pos >= 0 && combo[pos] == nv - 1) --pos;
        if (pos < 0) break;
        const int next = combo[pos] + 1;
        for (int i = pos; i < deg; ++i) combo[i] = next;
    }
}

}  // namespace

std::vector<std::string> library_variable_names(const std::vector<std::string>& state_names,
                                                int control_inputs) {
    std::vector<std::string> names = state_names;
    if (control_inputs == 1) {
        names.push_back("u");
    } else {
        for (int i = 1; i <= control_inputs; ++i) names.push_back("u" + std::to_string(i));
    }
    return names;
}

std::vector<Term> enumerate_terms(const LibrarySpec& spec, const std::vector<std::string>& var_names,
                                  bool pde_mode) {
    if (spec.polynomial_degree < 0) throw SpecError("polynomial_degree must be non-negative");
    if (spec.spatial_derivative_order < 0) throw SpecError("spatial_derivative_order must be non-negative");
    if (pde_mode && var_names.size() != 1) {
        throw SpecError("PDE-mode library expects a single field variable");
    }

    const int nv = static_cast<int>(var_names.size());
    std::vector<Term> terms;

    if (spec.include_constant) {
        Term t;
        t.kind = TermKind::constant;
        t.exponents.assign(nv, 0);
        t.label = "1";
        terms.push_back(std::move(t));
    }

    std::vector<std::vector<int>> exps;
    for (int deg = 1; deg <= spec.polynomial_degree; ++deg) append_monomials_of_degree(nv, deg, exps);
    for (auto& e : exps) {
        Term t;
        t.kind = TermKind::monomial;
        t.exponents = e;
        t.label = monomial_label(e, var_names);
        terms.push_back(std::move(t));
    }

    for (double freq : spec.trig_frequencies) {
        for (int v = 0; v < nv; ++v) {
            Term s;
            s.kind = TermKind::trig_sin;
            s.var = v;
            s.frequency = freq;
            s.label = "sin(" + format_number(freq) + "*" + var_names[v] + ")";
            terms.push_back(std::move(s));
            Term c;
            c.kind = TermKind::trig_cos;
            c.var = v;
            c.frequency = freq;
            c.label = "cos(" + format_number(freq) + "*" + var_names[v] + ")";
            terms.push_back(std::move(c));
        }
    }

    if (pde_mode) {
        for (int r = 1; r <= spec.spatial_derivative_order; ++r) {
            Term t;
            t.kind = TermKind::derivative;
            t.deriv_order = r;
            t.label = derivative_label(var_names[0], r);
            terms.push_back(std::move(t));
        }
        if (spec.include_mixed_terms && spec.spatial_derivative_order >= 1) {
            for (int a = 1; a <= spec.polynomial_degree; ++a) {
                Term t;
                t.kind = TermKind::mixed;
                t.power = a;
                t.deriv_order = 1;
                std::vector<int> e = {a};
                t.label = monomial_label(e, var_names) + "*" + derivative_label(var_names[0], 1);
                terms.push_back(std::move(t));
            }
        }
    } else if (spec.spatial_derivative_order > 0 || spec.include_mixed_terms) {
        throw SpecError("spatial derivative terms require a gridded field (PDE mode)");
    }

    if (terms.empty()) throw SpecError("library spec produces zero terms");
    return terms;
}

namespace {

// Product of variable columns according to the exponent vector, accumulated
// with the elementwise-multiply kernel.
void fill_monomial_column(const Matrix& data, const std::vector<int>& exponents, double* out,
                          std::size_t m) {
    bool first = true;
    for (std::size_t v = 0; v < exponents.size(); ++v) {
        for (int k = 0; k < exponents[v]; ++k) {
            const double* col = data.col(static_cast<int>(v)).data();
            if (first) {
                std::copy(col, col + m, out);
                first = false;
            } else {
                kernels::mul(out, col, out, m);
            }
        }
    }
    if (first) std::fill(out, out + m, 1.0);
}

Matrix evaluate_terms(const Matrix& data, const std::vector<Term>& terms,
                      const Matrix* derivative_columns) {
    const std::size_t m = static_cast<std::size_t>(data.rows());
    Matrix theta(data.rows(), static_cast<int>(terms.size()));
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const Term& t = terms[j];
        double* out = theta.col(static_cast<int>(j)).data();
        switch (t.kind) {
            case TermKind::constant:
                std::fill(out, out + m, 1.0);
                break;
            case TermKind::monomial:
                fill_monomial_column(data, t.exponents, out, m);
                break;
            case TermKind::trig_sin: {
                const double* col = data.col(t.var).data();
                for (std::size_t i = 0; i < m; ++i) out[i] = std::sin(t.frequency * col[i]);
                break;
            }
            case TermKind::trig_cos: {
                const double* col = data.col(t.var).data();
                for (std::size_t i = 0; i < m; ++i) out[i] = std::cos(t.frequency * col[i]);
                break;
            }
            case TermKind::derivative: {
                const double* col = derivative_columns->col(t.deriv_order - 1).data();
                std::copy(col, col + m, out);
                break;
            }
            case TermKind::mixed: {
                std::vector<int> e = {t.power};
                fill_monomial_column(data, e, out, m);
                kernels::mul(out, derivative_columns->col(0).data(), out, m);
                break;
            }
        }
    }
    return theta;
}

}  // namespace

EvaluatedLibrary build_library(const DataMatrix& data, const LibrarySpec& spec) {
    if (data.values.rows() < 1 || data.values.cols() < 1) throw InputError("empty data matrix");
    if (!all_finite(data.values)) throw InputError("data matrix contains non-finite entries");
    const int nv = static_cast<int>(data.values.cols());
    std::vector<std::string> names = data.names;
    if (static_cast<int>(names.size()) == nv - spec.control_inputs) {
        names = library_variable_names(names, spec.control_inputs);
    }
    if (static_cast<int>(names.size()) != nv) {
        names.clear();
        for (int v = 0; v < nv; ++v) names.push_back("x" + std::to_string(v));
    }
    auto terms = enumerate_terms(spec, names, /*pde_mode=*/false);

    EvaluatedLibrary lib;
    lib.spec = spec;
    lib.theta = evaluate_terms(data.values, terms, nullptr);
    lib.term_labels.reserve(terms.size());
    for (auto& t : terms) lib.term_labels.push_back(t.label);
    return lib;
}

namespace {

// Fornberg recurrence: finite difference weights for the order-th derivative
// at x0 on the given nodes.
std::vector<double> fornberg_weights(const std::vector<double>& nodes, double x0, int order) {
    const int nd = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j <= i - 1; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd + 1);
    for (int i = 0; i <= nd; ++i) w[i] = c[i][order];
    return w;
}

}  // namespace

Matrix build_spatial_derivatives(const Field& field, double dx, int max_order) {
    if (dx <= 0.0) throw ParameterError("dx must be positive");
    if (max_order < 1 || max_order > 4) throw ParameterError("max_order must be in [1,4]");
    const int m = field.time_points();
    const int s = field.space_points();
    if (s < 2 * max_order + 1) throw InputError("insufficient spatial grid for requested derivative order");
    if (!all_finite(field.values)) throw InputError("field contains non-finite entries");

    Matrix out(static_cast<long>(m) * s, max_order);
    Matrix deriv(m, s);
    for (int r = 1; r <= max_order; ++r) {
        const int hw = (r + 1) / 2;        // interior half-width, 2nd-order central
        const int bw = r + 2;              // boundary window, 2nd-order one-sided
        deriv.setZero();

        std::vector<double> nodes;
        auto apply = [&](int j, int first_node, const std::vector<double>& w) {
            double* dst = deriv.col(j).data();
            for (std::size_t t = 0; t < w.size(); ++t) {
                kernels::axpy(w[t], field.values.col(first_node + static_cast<int>(t)).data(), dst,
                              static_cast<std::size_t>(m));
            }
        };

        // interior: one centered weight set shared by all columns
        nodes.resize(2 * hw + 1);
        for (int t = 0; t <= 2 * hw; ++t) nodes[t] = (t - hw) * dx;
        const auto w_int = fornberg_weights(nodes, 0.0, r);
        for (int j = hw; j < s - hw; ++j) apply(j, j - hw, w_int);

        // boundaries: one-sided windows anchored at the edges
        nodes.resize(bw);
        for (int j = 0; j < hw; ++j) {
            for (int t = 0; t < bw; ++t) nodes[t] = t * dx;
            apply(j, 0, fornberg_weights(nodes, j * dx, r));
        }
        for (int j = s - hw; j < s; ++j) {
            const int first = s - bw;
            for (int t = 0; t < bw; ++t) nodes[t] = (first + t) * dx;
            apply(j, first, fornberg_weights(nodes, j * dx, r));
        }

        out.col(r - 1) = Eigen::Map<const Vector>(deriv.data(), static_cast<long>(m) * s);
    }
    return out;
}

EvaluatedLibrary build_pde_library(const Field& field, const LibrarySpec& spec) {
    field.validate();
    if (spec.control_inputs != 0) throw SpecError("control inputs are not supported in PDE mode");
    auto terms = enumerate_terms(spec, {"u"}, /*pde_mode=*/true);

    const long mn = static_cast<long>(field.time_points()) * field.space_points();
    Matrix flat(mn, 1);
    flat.col(0) = Eigen::Map<const Vector>(field.values.data(), mn);

    Matrix derivs;
    if (spec.spatial_derivative_order >= 1) {
        derivs = build_spatial_derivatives(field, field.dx, spec.spatial_derivative_order);
    }

    EvaluatedLibrary lib;
    lib.spec = spec;
    lib.theta = evaluate_terms(flat, terms, derivs.size() > 0 ? &derivs : nullptr);
    lib.term_labels.reserve(terms.size());
    for (auto& t : terms) lib.term_labels.push_back(t.label);
    return lib;
}

Vector evaluate_library_row(const Vector& vars, const LibrarySpec& spec,
                            const std::vector<Term>& terms) {
    (void)spec;
    Vector row(static_cast<int>(terms.size()));
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const Term& t = terms[j];
        switch (t.kind) {
            case TermKind::constant:
                row[static_cast<int>(j)] = 1.0;
                break;
            case TermKind::monomial: {
                double v = 1.0;
                for (std::size_t k = 0; k < t.exponents.size(); ++k) {
                    for (int e = 0; e < t.exponents[k]; ++e) v *= vars[static_cast<int>(k)];
                }
                row[static_cast<int>(j)] = v;
                break;
            }
            case TermKind::trig_sin:
                row[static_cast<int>(j)] = std::sin(t.frequency * vars[t.var]);
                break;
            case TermKind::trig_cos:
                row[static_cast<int>(j)] = std::cos(t.frequency * vars[t.var]);
                break;
            default:
                throw SpecError("derivative library terms cannot be evaluated at a point state");
        }
    }
    return row;
}

}  // namespace esindy
