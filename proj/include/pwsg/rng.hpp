#pragma once

#include <cstdint>

// Counter-based random numbers for reproducible ensembles.
//
// Every draw is a pure function of (seed, stream, counter), so runs are
// bit-identical regardless of evaluation order, thread count, or how many
// draws other streams consumed.  Streams decouple independent consumers
// (one per chain stage, one per particle of an entangled pair, one per
// sweep cell); the counter is the member index within the ensemble.
// The mixer is the SplitMix64 finalizer, which passes the usual
// statistical batteries when used this way.

namespace pwsg {

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from (seed, stream, counter).
constexpr double uniform01(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter) {
  const std::uint64_t h = mix64(seed ^ mix64(stream ^ mix64(counter)));
  // Top 53 bits -> [0, 1) with full double resolution.
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Uniform double in [-half_width, half_width).
constexpr double uniform_symmetric(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter, double half_width) {
  return (2.0 * uniform01(seed, stream, counter) - 1.0) * half_width;
}

}  // namespace pwsg
