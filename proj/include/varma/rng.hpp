#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace varma {

/// Draw algorithm is pinned: mt19937_64 for the uniform stream, Box-Muller
/// for the normal transform.  std::normal_distribution is deliberately not
/// used because its output is implementation-defined; this sampler gives the
/// same bits on every platform and is recorded in output metadata.
class GaussianSampler {
 public:
  static constexpr const char* algorithm = "mt19937_64+box-muller";

  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1), both with 53 random bits.
    const double u1 = ((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = (engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream-splitting for parallel replications: mixes (master, index) with
/// splitmix64 so per-replication streams are fixed by the pair alone.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace varma
