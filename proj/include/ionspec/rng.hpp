#ifndef IONSPEC_RNG_HPP
#define IONSPEC_RNG_HPP

#include <cstdint>
#include <random>

namespace ionspec {

// splitmix64 step, used only to whiten stream keys before seeding mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream per (seed, point, shot). Results must not depend on how
// points are distributed over threads, so every shot gets its own engine and
// no engine is ever shared or reused across loop iterations.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t point,
                                  std::uint64_t shot = 0) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s ^= point * 0xd1342543de82ef95ULL;
  k ^= splitmix64(s);
  s ^= shot * 0xaf251af3b0f025b5ULL;
  k ^= splitmix64(s);
  return std::mt19937_64(k);
}

}  // namespace ionspec

#endif
