#pragma once

#include <cstdint>
#include <random>

namespace tailfactor {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent sub-task (bootstrap replicate, grid cell, ...).
/// Depends only on (base, index), so serial and parallel schedules agree.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ splitmix64(index));
}

/// Uniform draw on (0, 1]; never returns zero, so 1/u is a valid Pareto draw.
inline double uniform_open_closed(Rng& rng) {
  // 53 random mantissa bits mapped to {1, ..., 2^53} / 2^53.
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

}  // namespace tailfactor
