#pragma once

#include <cstdint>

namespace shadowctl {

/// splitmix64 step. Run i of a sweep draws its mt19937_64 seed from the
/// (i+1)-th output of the stream started at the base seed, so runs are
/// independent of how many other runs there are.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t run) {
  std::uint64_t state = base + run * 0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

}  // namespace shadowctl
