#pragma once

#include <cstdint>
#include <utility>

#include "esindy/ensemble.hpp"
#include "esindy/library.hpp"
#include "esindy/types.hpp"

namespace esindy {

struct WeakConfig {
    int n_domains = 256;          // K
    int domain_time_extent = 0;   // grid intervals per domain; 0 -> (m-1)/8
    int domain_space_extent = 0;  // 0 -> (s-1)/8
    int test_function_degree = 4; // p in (1 - z^2)^p
    std::uint64_t seed = 0;
};

// Integrated linear system q0 = Q Xi over K randomly placed domains. Row k of
// Q and entry k of q0 come from the same domain and test function.
struct WeakSystem {
    Vector q0;  // K
    Matrix Q;   // K x D
    std::vector<std::string> term_labels;
    std::vector<std::pair<int, int>> domain_offsets;  // (time, space) grid offsets
    int domain_time_extent = 0;
    int domain_space_extent = 0;
    int test_function_degree = 0;
};

// Separable polynomial bump phi(x)psi(t) = (1-x^2)^p (1-t^2)^p on each domain
// rescaled to [-1,1]^2; the time derivative and spatial derivatives are moved
// onto the test function by integration by parts, and mixed advection terms
// u^a u_x integrate as -1/(a+1) * integral of u^(a+1) phi' psi. Quadrature is
// the trapezoidal rule on the native grid.
WeakSystem assemble_weak_system(const Field& field, const LibrarySpec& spec, const WeakConfig& cfg);

// Library bagging on (Q, q0); aggregation and ip thresholding as in ensembling.
EnsembleResult discover_pde(const Field& field, const LibrarySpec& spec, const WeakConfig& wcfg,
                            const RegressionConfig& reg, const EnsembleConfig& ens);

// Single sparse fit on the weak system (the non-ensembled baseline).
CoefficientMatrix weak_single_fit(const WeakSystem& system, const RegressionConfig& reg);

// r-th derivative of the bump (1-z^2)^p sampled on extent+1 points spanning a
// physical width extent*spacing, including the chain-rule mapping factors.
// Exposed so the tests can check compact support and quadrature identities.
std::vector<double> test_function_profile(int extent, int p, int deriv_order, double spacing);

}  // namespace esindy
