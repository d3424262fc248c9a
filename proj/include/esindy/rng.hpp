#pragma once

#include <cstdint>
#include <random>

namespace esindy {

// splitmix64 finalizer, used to derive well-separated substream seeds from a
// master seed. Parallel and serial ensemble runs stay identical because each
// member/trial seeds its own engine from (master, stream index).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master) ^ mix64(stream + 0x51ed2701ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream) {
    return std::mt19937_64(substream_seed(master, stream));
}

}  // namespace esindy
