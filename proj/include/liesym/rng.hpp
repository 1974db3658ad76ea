#pragma once

#include <cstdint>

namespace liesym {

// Counter-based uniform generator: a pure hash of (seed, axis, index), so
// sampling is reproducible, order-independent, and safely parallel.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t axis, std::uint64_t index);

// Uniform in [0, 1).
double uniform01(std::uint64_t seed, std::uint64_t axis, std::uint64_t index);

// Uniform in [lo, hi).
double uniform_in(double lo, double hi, std::uint64_t seed, std::uint64_t axis,
                  std::uint64_t index);

// Deterministic derived seed for a sub-stream (per-trial, per-stage).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace liesym
