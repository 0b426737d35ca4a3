#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace infoval {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `master`:
///   derive_seed(m, i) = splitmix64(m ^ splitmix64(i)).
/// Every replication, horizon and forecast origin draws from its own derived
/// seed, so serial and parallel runs consume identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream));
}

/// Nested derivation: derive_seed(derive_seed(m, a), b), ...
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  for (auto s : path) master = derive_seed(master, s);
  return master;
}

/// Standard normal draws from a seeded engine.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return dist_(engine_); }
  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace infoval
