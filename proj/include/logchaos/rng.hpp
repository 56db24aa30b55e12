#pragma once

#include <cstdint>
#include <random>

namespace logchaos {

/// Independent purposes drawing from the same (seed, replica) pair get
/// distinct streams.
enum class StreamPurpose : std::uint64_t {
  cutoff_field = 0x5343u,
  holder_field = 0x484fu,
  kl_field = 0x4b4cu,
  zeta_field = 0x5a45u,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Random stream of one replica.  A pure function of (seed, replica, purpose),
/// so any assignment of replicas to workers reproduces the same values.
class ReplicaStream {
 public:
  ReplicaStream(std::uint64_t seed, std::uint64_t replica,
                StreamPurpose purpose = StreamPurpose::cutoff_field) {
    std::uint64_t a = splitmix64(seed);
    std::uint64_t b = splitmix64(a ^ splitmix64(replica + 1));
    std::uint64_t c = splitmix64(b ^ static_cast<std::uint64_t>(purpose));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace logchaos
