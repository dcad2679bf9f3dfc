#ifndef OPMS_RANDOM_H_
#define OPMS_RANDOM_H_

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace opms {

using Rng = std::mt19937_64;

// Mixes a seed with a purpose tag so that streams drawn from one trial seed
// (assembly, split, fit, noise) do not overlap.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace seed_salt {
inline constexpr std::uint64_t kAssembly = 1;
inline constexpr std::uint64_t kSplit = 2;
inline constexpr std::uint64_t kFit = 3;
inline constexpr std::uint64_t kNoise = 4;
inline constexpr std::uint64_t kBackground = 5;
inline constexpr std::uint64_t kCoalitions = 6;
inline constexpr std::uint64_t kGenerate = 7;
}  // namespace seed_salt

// Seeded permutation of [0, n).
inline std::vector<std::size_t> seeded_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace opms

#endif  // OPMS_RANDOM_H_
