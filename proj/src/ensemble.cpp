#include "esindy/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "esindy/parallel.hpp"
#include "esindy/rng.hpp"

namespace esindy {

void EnsembleConfig::validate() const {
    if (n_models < 1) throw ParameterError("ensemble needs at least one model");
    if (ip_threshold < 0.0 || ip_threshold > 1.0) throw ParameterError("ip_threshold must be in [0,1]");
    if (library_fraction <= 0.0 || library_fraction > 1.0) {
        throw ParameterError("library_fraction must be in (0,1]");
    }
}

std::vector<int> bootstrap_rows(int m, std::mt19937_64& rng) {
    if (m < 1) throw ParameterError("bootstrap_rows: m must be positive");
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::vector<int> rows(m);
    for (int i = 0; i < m; ++i) rows[i] = pick(rng);
    return rows;
}

Matrix inclusion_probabilities(const std::vector<Matrix>& stack,
                               const std::vector<std::vector<std::uint8_t>>& candidacy,
                               std::vector<std::string>* warnings) {
    if (stack.empty()) throw ParameterError("inclusion_probabilities: empty stack");
    const int d = static_cast<int>(stack[0].rows());
    const int n = static_cast<int>(stack[0].cols());
    Matrix ip = Matrix::Zero(d, n);
    for (int t = 0; t < d; ++t) {
        int candidates = 0;
        Eigen::VectorXi nonzero = Eigen::VectorXi::Zero(n);
        for (std::size_t b = 0; b < stack.size(); ++b) {
            if (!candidacy.empty() && candidacy[b][t] == 0) continue;
            ++candidates;
            for (int i = 0; i < n; ++i) {
                if (stack[b](t, i) != 0.0) ++nonzero[i];
            }
        }
        if (candidates == 0) {
            if (warnings != nullptr) {
                warnings->push_back("term " + std::to_string(t) + " was never a candidate; ip set to 0");
            }
            continue;
        }
        for (int i = 0; i < n; ++i) ip(t, i) = static_cast<double>(nonzero[i]) / candidates;
    }
    return ip;
}

CoefficientMatrix threshold_by_ip(const CoefficientMatrix& xi, const Matrix& ip, double tol) {
    if (xi.xi.rows() != ip.rows() || xi.xi.cols() != ip.cols()) {
        throw ShapeError("threshold_by_ip: shape mismatch");
    }
    CoefficientMatrix out = xi;
    for (int j = 0; j < ip.cols(); ++j) {
        for (int i = 0; i < ip.rows(); ++i) {
            if (ip(i, j) < tol) out.xi(i, j) = 0.0;
        }
    }
    return out;
}

namespace {

double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t q = v.size();
    if (q % 2 == 1) return v[q / 2];
    return 0.5 * (v[q / 2 - 1] + v[q / 2]);  // even q: average the central pair
}

PerCoefficientStats stack_stats(const std::vector<Matrix>& stack) {
    const int d = static_cast<int>(stack[0].rows());
    const int n = static_cast<int>(stack[0].cols());
    const int q = static_cast<int>(stack.size());
    PerCoefficientStats s;
    s.mean = Matrix::Zero(d, n);
    s.median = Matrix::Zero(d, n);
    s.stddev = Matrix::Zero(d, n);
    for (const Matrix& m : stack) s.mean += m;
    s.mean /= static_cast<double>(q);
    std::vector<double> vals(q);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i) {
            double ss = 0.0;
            for (int b = 0; b < q; ++b) {
                vals[b] = stack[b](i, j);
                const double dev = vals[b] - s.mean(i, j);
                ss += dev * dev;
            }
            s.median(i, j) = median_of(vals);
            s.stddev(i, j) = q > 1 ? std::sqrt(ss / (q - 1)) : 0.0;
        }
    }
    return s;
}

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
    Matrix out(static_cast<int>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int>(i)) = src.row(rows[i]);
    return out;
}

EnsembleResult run_row_ensemble(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                                const RegressionConfig& reg, const EnsembleConfig& ens,
                                Aggregation agg, const RowSampler& sampler) {
    ens.validate();
    reg.validate();
    if (theta.theta.rows() != ut.values.rows()) throw ShapeError("ensemble: row count mismatch");
    const int m = static_cast<int>(theta.theta.rows());
    const int n = static_cast<int>(ut.values.cols());
    const int q = ens.n_models;

    EnsembleResult result;
    result.config = ens;
    result.config.aggregation = agg;
    result.coefficient_stack.resize(q);

    parallel_for(q, [&](int b) {
        auto rng = make_engine(ens.seed, static_cast<std::uint64_t>(b));
        const std::vector<int> rows = sampler ? sampler(m, rng) : bootstrap_rows(m, rng);
        Matrix theta_b = gather_rows(theta.theta, rows);
        Matrix ut_b = gather_rows(ut.values, rows);
        // degenerate members yield an all-zero matrix instead of aborting
        try {
            result.coefficient_stack[b] = sparsify_system(theta_b, ut_b, reg, nullptr);
        } catch (const std::exception&) {
            result.coefficient_stack[b] = Matrix::Zero(theta.theta.cols(), n);
        }
    });

    result.inclusion_probabilities = inclusion_probabilities(result.coefficient_stack, {}, &result.warnings);
    result.stats = stack_stats(result.coefficient_stack);

    CoefficientMatrix agg_model;
    agg_model.xi = agg == Aggregation::mean ? result.stats.mean : result.stats.median;
    agg_model.term_labels = theta.term_labels;
    for (int i = 0; i < n; ++i) agg_model.state_labels.push_back("state" + std::to_string(i));
    result.aggregated = threshold_by_ip(agg_model, result.inclusion_probabilities, ens.ip_threshold);
    return result;
}

}  // namespace

EnsembleResult bagging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                       const RegressionConfig& reg, const EnsembleConfig& ens,
                       const RowSampler& sampler) {
    return run_row_ensemble(theta, ut, reg, ens, Aggregation::mean, sampler);
}

EnsembleResult bragging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                        const RegressionConfig& reg, const EnsembleConfig& ens,
                        const RowSampler& sampler) {
    return run_row_ensemble(theta, ut, reg, ens, Aggregation::median, sampler);
}

namespace {

// l distinct values from 0..d-1 (partial Fisher-Yates), returned sorted.
std::vector<int> sample_without_replacement(int d, int l, std::mt19937_64& rng) {
    std::vector<int> pool(d);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < l; ++i) {
        std::uniform_int_distribution<int> pick(i, d - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + l);
    std::sort(out.begin(), out.end());
    return out;
}

Matrix gather_cols(const Matrix& src, const std::vector<int>& cols) {
    Matrix out(src.rows(), static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<int>(j)) = src.col(cols[j]);
    return out;
}

}  // namespace

EnsembleResult library_bagging(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                               const RegressionConfig& reg, const EnsembleConfig& ens) {
    ens.validate();
    reg.validate();
    const int d = theta.terms();
    const int n = static_cast<int>(ut.values.cols());
    const int q = ens.n_models;
    const int l = static_cast<int>(std::lround(ens.library_fraction * d));
    if (l < 1) throw ParameterError("library_fraction * D must be at least 1");
    if (l > d) throw ParameterError("sub-library size exceeds library size");

    // Stage 1: term bootstraps (without replacement) on all rows.
    std::vector<Matrix> stack(q);
    std::vector<std::vector<std::uint8_t>> candidacy(q, std::vector<std::uint8_t>(d, 0));
    parallel_for(q, [&](int b) {
        auto rng = make_engine(ens.seed, static_cast<std::uint64_t>(b));
        const std::vector<int> cols = sample_without_replacement(d, l, rng);
        for (int c : cols) candidacy[b][c] = 1;
        Matrix xi_red;
        try {
            xi_red = sparsify_system(gather_cols(theta.theta, cols), ut.values, reg, nullptr);
        } catch (const std::exception&) {
            xi_red = Matrix::Zero(l, n);
        }
        Matrix embedded = Matrix::Zero(d, n);
        for (std::size_t j = 0; j < cols.size(); ++j) embedded.row(cols[j]) = xi_red.row(static_cast<int>(j));
        stack[b] = std::move(embedded);
    });

    EnsembleResult result;
    result.config = ens;
    result.stage1_inclusion_probabilities = inclusion_probabilities(stack, candidacy, &result.warnings);

    // A term survives screening if any state keeps it above tol.
    for (int t = 0; t < d; ++t) {
        bool keep = false;
        for (int i = 0; i < n; ++i) {
            if (result.stage1_inclusion_probabilities(t, i) >= ens.ip_threshold) keep = true;
        }
        if (keep) result.retained_terms.push_back(t);
    }

    if (result.retained_terms.empty()) {
        result.warnings.push_back("library screening removed every term; returning the empty model");
        result.coefficient_stack.assign(q, Matrix::Zero(d, n));
        result.inclusion_probabilities = Matrix::Zero(d, n);
        result.stats = stack_stats(result.coefficient_stack);
        result.aggregated.xi = Matrix::Zero(d, n);
        result.aggregated.term_labels = theta.term_labels;
        for (int i = 0; i < n; ++i) result.aggregated.state_labels.push_back("state" + std::to_string(i));
        return result;
    }

    // Stage 2: bagging on the reduced library, fresh substreams.
    EvaluatedLibrary reduced;
    reduced.spec = theta.spec;
    reduced.theta = gather_cols(theta.theta, result.retained_terms);
    for (int t : result.retained_terms) reduced.term_labels.push_back(theta.term_labels[t]);
    EnsembleConfig stage2 = ens;
    stage2.seed = substream_seed(ens.seed, 0x9b4cULL);
    EnsembleResult inner = bagging(reduced, ut, reg, stage2);

    // Re-embed everything in the original D-term indexing.
    result.coefficient_stack.assign(q, Matrix::Zero(d, n));
    for (int b = 0; b < q; ++b) {
        for (std::size_t j = 0; j < result.retained_terms.size(); ++j) {
            result.coefficient_stack[b].row(result.retained_terms[j]) =
                inner.coefficient_stack[b].row(static_cast<int>(j));
        }
    }
    auto embed = [&](const Matrix& small) {
        Matrix full = Matrix::Zero(d, n);
        for (std::size_t j = 0; j < result.retained_terms.size(); ++j) {
            full.row(result.retained_terms[j]) = small.row(static_cast<int>(j));
        }
        return full;
    };
    result.inclusion_probabilities = embed(inner.inclusion_probabilities);
    result.stats.mean = embed(inner.stats.mean);
    result.stats.median = embed(inner.stats.median);
    result.stats.stddev = embed(inner.stats.stddev);
    result.aggregated.xi = embed(inner.aggregated.xi);
    result.aggregated.term_labels = theta.term_labels;
    result.aggregated.state_labels = inner.aggregated.state_labels;
    for (const auto& w : inner.warnings) result.warnings.push_back(w);
    return result;
}

CoefficientMatrix stability_selection(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                                      const RegressionConfig& reg, const EnsembleConfig& ens,
                                      bool with_replacement, Matrix* importance_out) {
    ens.validate();
    reg.validate();
    const int m = static_cast<int>(theta.theta.rows());
    if (m < 4) throw ParameterError("stability_selection needs at least 4 samples");
    const int n = static_cast<int>(ut.values.cols());
    const int d = theta.terms();
    const int q = ens.n_models;

    std::vector<Matrix> stack(q);
    parallel_for(q, [&](int b) {
        auto rng = make_engine(ens.seed, static_cast<std::uint64_t>(b));
        std::vector<int> rows;
        if (with_replacement) {
            rows = bootstrap_rows(m, rng);
        } else {
            rows = sample_without_replacement(m, m / 2, rng);  // distinct row subset
        }
        Matrix theta_b(static_cast<int>(rows.size()), d);
        Matrix ut_b(static_cast<int>(rows.size()), n);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            theta_b.row(static_cast<int>(i)) = theta.theta.row(rows[i]);
            ut_b.row(static_cast<int>(i)) = ut.values.row(rows[i]);
        }
        try {
            stack[b] = sparsify_system(theta_b, ut_b, reg, nullptr);
        } catch (const std::exception&) {
            stack[b] = Matrix::Zero(d, n);
        }
    });

    const Matrix importance = inclusion_probabilities(stack, {}, nullptr);
    if (importance_out != nullptr) *importance_out = importance;

    CoefficientMatrix out;
    out.xi = Matrix::Zero(d, n);
    out.term_labels = theta.term_labels;
    for (int state = 0; state < n; ++state) {
        out.state_labels.push_back("state" + std::to_string(state));
        std::vector<int> kept;
        for (int t = 0; t < d; ++t) {
            if (importance(t, state) >= ens.ip_threshold) kept.push_back(t);
        }
        if (kept.empty()) continue;
        Matrix sub(theta.theta.rows(), static_cast<int>(kept.size()));
        for (std::size_t j = 0; j < kept.size(); ++j) sub.col(static_cast<int>(j)) = theta.theta.col(kept[j]);
        const Vector coef = ridge_solve(sub, ut.values.col(state), 0.0);
        for (std::size_t j = 0; j < kept.size(); ++j) out.xi(kept[j], state) = coef[static_cast<int>(j)];
    }
    return out;
}

}  // namespace esindy
