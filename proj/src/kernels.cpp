#include "esindy/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "esindy/types.hpp"

namespace esindy::kernels {

namespace scalar {
extern const KernelTable table;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable table;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const KernelTable table;
}
#endif

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return scalar::table;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return avx2::table;
#else
            break;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return neon::table;
#else
            break;
#endif
    }
    throw ParameterError("kernel backend not available on this platform");
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "unknown";
}

namespace {

Backend pick_default() {
    const char* env = std::getenv("ESINDY_SIMD");
    if (env != nullptr && std::strcmp(env, "auto") != 0) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2)) return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && backend_available(Backend::neon)) return Backend::neon;
        return Backend::scalar;  // unknown or unsupported value falls back
    }
    if (backend_available(Backend::avx2)) return Backend::avx2;
    if (backend_available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

std::atomic<Backend> g_backend{pick_default()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

const KernelTable& active() { return table_for(active_backend()); }

void set_backend(Backend b) {
    if (!backend_available(b)) {
        throw ParameterError("kernel backend '" + backend_name(b) + "' not supported on this CPU");
    }
    g_backend.store(b, std::memory_order_relaxed);
}

}  // namespace esindy::kernels
