#include "esindy/regression.hpp"

#include <cmath>

#include "esindy/kernels.hpp"

namespace esindy {

void RegressionConfig::validate() const {
    if (lambda1 < 0.0) throw ParameterError("lambda1 must be non-negative");
    if (lambda2 < 0.0) throw ParameterError("lambda2 must be non-negative");
    if (max_iterations < 1) throw ParameterError("max_iterations must be at least 1");
}

Vector ridge_solve(const Matrix& theta, const Vector& b, double lambda2) {
    if (theta.rows() != b.size()) throw ShapeError("ridge_solve: row count mismatch");
    if (theta.rows() < 1 || theta.cols() < 1) throw ShapeError("ridge_solve: empty system");
    if (lambda2 < 0.0) throw ParameterError("lambda2 must be non-negative");
    if (lambda2 == 0.0) {
        return theta.completeOrthogonalDecomposition().solve(b);
    }
    Matrix gram = theta.transpose() * theta;
    gram.diagonal().array() += lambda2;
    return gram.ldlt().solve(theta.transpose() * b);
}

namespace {

Matrix gather_columns(const Matrix& theta, const std::vector<int>& idx) {
    Matrix sub(theta.rows(), static_cast<int>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) sub.col(static_cast<int>(j)) = theta.col(idx[j]);
    return sub;
}

}  // namespace

Matrix sparsify_system(const Matrix& theta_in, const Matrix& targets, const RegressionConfig& config,
                       SparsifyInfo* info) {
    config.validate();
    if (theta_in.rows() != targets.rows()) throw ShapeError("sparsify: row count mismatch");
    const int d = static_cast<int>(theta_in.cols());
    const int n = static_cast<int>(targets.cols());

    // Optional unit-norm column scaling; physical coefficient = scaled / norm.
    Matrix theta = theta_in;
    std::vector<double> colnorm(d, 1.0);
    if (config.normalize_columns) {
        for (int j = 0; j < d; ++j) {
            double* col = theta.col(j).data();
            const double nrm = std::sqrt(kernels::sumsq(col, static_cast<std::size_t>(theta.rows())));
            if (nrm > 0.0) {
                colnorm[j] = nrm;
                kernels::scale(1.0 / nrm, col, static_cast<std::size_t>(theta.rows()));
            }
        }
    }

    if (info != nullptr) {
        info->all_zero.assign(n, false);
        info->converged.assign(n, true);
    }

    Matrix xi = Matrix::Zero(d, n);
    for (int state = 0; state < n; ++state) {
        const Vector b = targets.col(state);

        std::vector<int> active(d);
        for (int j = 0; j < d; ++j) active[j] = j;
        Vector coef = ridge_solve(theta, b, config.lambda2);  // scaled coefficients

        bool converged = false;
        for (int it = 0; it < config.max_iterations; ++it) {
            // threshold the physical coefficients; |xi| == lambda1 is kept
            std::vector<int> kept;
            kept.reserve(active.size());
            for (std::size_t j = 0; j < active.size(); ++j) {
                if (std::abs(coef[static_cast<int>(j)] / colnorm[active[j]]) >= config.lambda1) {
                    kept.push_back(active[j]);
                }
            }
            if (kept.size() == active.size()) {
                converged = true;
                break;
            }
            active = std::move(kept);
            if (active.empty()) {
                converged = true;
                break;
            }
            coef = ridge_solve(gather_columns(theta, active), b, config.lambda2);
        }

        if (!converged) {
            // cap reached with the support still moving: enforce the
            // elimination invariant and flag the state
            std::vector<int> kept;
            Vector pruned(static_cast<int>(active.size()));
            int kn = 0;
            for (std::size_t j = 0; j < active.size(); ++j) {
                if (std::abs(coef[static_cast<int>(j)] / colnorm[active[j]]) >= config.lambda1) {
                    kept.push_back(active[j]);
                    pruned[kn++] = coef[static_cast<int>(j)];
                }
            }
            active = std::move(kept);
            coef = pruned.head(kn);
            if (info != nullptr) info->converged[state] = false;
        }

        if (active.empty()) {
            if (info != nullptr) info->all_zero[state] = true;
            continue;
        }
        for (std::size_t j = 0; j < active.size(); ++j) {
            xi(active[j], state) = coef[static_cast<int>(j)] / colnorm[active[j]];
        }
    }
    return xi;
}

CoefficientMatrix sparsify_dynamics(const EvaluatedLibrary& theta, const DerivativeMatrix& ut,
                                    const RegressionConfig& config, SparsifyInfo* info) {
    if (theta.theta.rows() != ut.values.rows()) {
        throw ShapeError("sparsify_dynamics: library and derivative row counts differ");
    }
    CoefficientMatrix out;
    out.xi = sparsify_system(theta.theta, ut.values, config, info);
    out.term_labels = theta.term_labels;
    for (int i = 0; i < ut.values.cols(); ++i) out.state_labels.push_back("state" + std::to_string(i));
    return out;
}

}  // namespace esindy
