#pragma once

#include <cstddef>
#include <string>

// Data-parallel arithmetic kernels used by the library evaluation, finite
// difference, quadrature and ensemble-statistics inner loops. Each kernel has
// a scalar reference implementation and SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at startup from CPU capabilities. The active backend
// can be forced with the ESINDY_SIMD environment variable ("scalar", "avx2",
// "neon", "auto") or programmatically, which the equivalence tests use.
//
// Elementwise kernels (mul, axpy, scale) produce bit-identical results across
// backends. Reduction kernels (dot, sum, sumsq) may differ by rounding because
// the SIMD variants accumulate in independent lanes; within one process the
// backend is fixed, so results stay reproducible run to run.

namespace esindy::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sumsq)(const double* a, std::size_t n);
};

// Active table; initialized before main() from CPU detection + ESINDY_SIMD.
const KernelTable& active();

Backend active_backend();
std::string backend_name(Backend b);

// Force a backend (throws ParameterError if unsupported on this CPU).
void set_backend(Backend b);

// Table for one specific backend, for direct equivalence testing.
const KernelTable& table_for(Backend b);
bool backend_available(Backend b);

// Convenience forwarders through the active table.
inline void mul(const double* a, const double* b, double* out, std::size_t n) {
    active().mul(a, b, out, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void scale(double alpha, double* x, std::size_t n) { active().scale(alpha, x, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double sumsq(const double* a, std::size_t n) { return active().sumsq(a, n); }

}  // namespace esindy::kernels
