#include "esindy/differentiation.hpp"

#include <Eigen/Dense>

#include "esindy/kernels.hpp"

namespace esindy {

DerivativeMatrix finite_difference_time(const DataMatrix& data) {
    if (data.values.rows() < 3) throw InputError("finite_difference_time needs at least 3 samples");
    if (data.dt <= 0.0) throw InputError("dt must be positive");
    const int m = data.rows();
    const int n = data.cols();
    const double inv2h = 1.0 / (2.0 * data.dt);

    DerivativeMatrix out;
    out.method_tag = "central";
    out.values = Matrix::Zero(m, n);
    for (int c = 0; c < n; ++c) {
        const double* u = data.values.col(c).data();
        double* d = out.values.col(c).data();
        // interior rows 1..m-2 as two shifted axpy passes
        kernels::axpy(inv2h, u + 2, d + 1, static_cast<std::size_t>(m - 2));
        kernels::axpy(-inv2h, u, d + 1, static_cast<std::size_t>(m - 2));
        d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2h;
        d[m - 1] = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) * inv2h;
    }
    return out;
}

DerivativeMatrix smoothed_difference(const DataMatrix& data, int window) {
    const int m = data.rows();
    if (window < 3 || window % 2 == 0) throw ParameterError("smoothing window must be odd and >= 3");
    if (window >= m) throw ParameterError("smoothing window must be smaller than the sample count");
    if (data.dt <= 0.0) throw InputError("dt must be positive");
    const int n = data.cols();
    const int hw = (window - 1) / 2;

    // Symmetric interior window: the quadratic term is orthogonal to the
    // linear one, so the derivative at the center is the plain linear slope.
    double sk2 = 0.0;
    for (int k = -hw; k <= hw; ++k) sk2 += static_cast<double>(k) * k;

    DerivativeMatrix out;
    out.method_tag = "quadratic-window-" + std::to_string(window);
    out.values = Matrix::Zero(m, n);

    for (int c = 0; c < n; ++c) {
        const double* u = data.values.col(c).data();
        double* d = out.values.col(c).data();
        for (int i = 0; i < m; ++i) {
            const int lo = std::max(0, i - hw);
            const int hi = std::min(m - 1, i + hw);
            if (lo == i - hw && hi == i + hw) {
                double acc = 0.0;
                for (int k = -hw; k <= hw; ++k) acc += k * u[i + k];
                d[i] = acc / (sk2 * data.dt);
            } else {
                // truncated boundary window: full quadratic fit around sample i
                Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
                Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
                for (int j = lo; j <= hi; ++j) {
                    const double t = (j - i) * data.dt;
                    const Eigen::Vector3d phi(1.0, t, t * t);
                    G += phi * phi.transpose();
                    rhs += phi * u[j];
                }
                const Eigen::Vector3d coef = G.ldlt().solve(rhs);
                d[i] = coef[1];
            }
        }
    }
    return out;
}

}  // namespace esindy
