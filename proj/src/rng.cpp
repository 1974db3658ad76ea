#include "liesym/rng.hpp"

namespace liesym {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t axis, std::uint64_t index) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (axis * 0xd6e8feb86659fd93ULL));
    h = mix64(h ^ (index * 0xa0761d6478bd642fULL));
    return h;
}

double uniform01(std::uint64_t seed, std::uint64_t axis, std::uint64_t index) {
    // Top 53 bits give a double uniform on [0, 1).
    return static_cast<double>(counter_hash(seed, axis, index) >> 11) * 0x1.0p-53;
}

double uniform_in(double lo, double hi, std::uint64_t seed, std::uint64_t axis,
                  std::uint64_t index) {
    return lo + (hi - lo) * uniform01(seed, axis, index);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return counter_hash(seed, 0xfeedULL, stream);
}

}  // namespace liesym
