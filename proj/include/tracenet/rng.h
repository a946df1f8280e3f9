#ifndef TRACENET_RNG_H_
#define TRACENET_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tracenet {

std::uint64_t splitmix64(std::uint64_t x);

// 64-bit FNV-1a.
std::uint64_t hash_bytes(std::string_view bytes);

// Derives an independent stream seed from a parent seed and a path of
// labels, e.g. derive_seed(master, {hash_bytes("mobility")}).
std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> path);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

// Maps 64 random bits onto [0, 1) with 53-bit resolution.
inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based uniform: the same (seed, key) always yields the same value,
// independent of how many other draws happened.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t key) {
  return unit_from_bits(splitmix64(seed ^ splitmix64(key)));
}

// Sequential generator. Only the engine and the Poisson sampler come from the
// standard library; uniform draws use fixed bit arithmetic so that they do not
// depend on the library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return unit_from_bits(engine_()); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  int poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tracenet

#endif  // TRACENET_RNG_H_
