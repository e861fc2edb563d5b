#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace rasgd::rng {

/* Seed-stream layout
 *
 * Every random draw in the library flows through an engine constructed from
 * a seed derived with derive(): the master seed mixed with a stream tag and
 * the indices that identify the draw site (trial, round, device).  Results
 * are therefore a pure function of (config, seed) no matter how work is
 * scheduled across threads.
 */

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += kGolden;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mix a master seed with stream coordinates into a fresh engine seed.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  for (std::uint64_t p : parts) {
    s ^= p + kGolden + (s << 6) + (s >> 2);
    (void)splitmix64(s);
  }
  return splitmix64(s);
}

/// Fixed tags keep unrelated streams (population draw, trial draws, ...)
/// from colliding even when their numeric coordinates coincide.
enum Stream : std::uint64_t {
  kPopulation = 0x706f70756c617465ULL,
  kTrial = 0x747269616c000001ULL,
  kRound = 0x726f756e64000001ULL,
  kDevice = 0x6465766963650001ULL,
  kChannel = 0x6368616e6e656c01ULL,
  kNoise = 0x6e6f697365000001ULL,
  kMinibatch = 0x6d696e6962617463ULL,
  kWeights = 0x7765696768740001ULL,
};

/* xoshiro256++ (public domain algorithm).  Chosen over mt19937_64 because
 * per-device substreams mean millions of engine constructions per run and
 * the Mersenne Twister's 2.5 KB state fill dominates everything else. */
class Engine {
 public:
  using result_type = std::uint64_t;

  explicit Engine(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  return Engine(derive(seed, parts));
}

/// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; safe as a log() argument.
inline double uniform01_open(Engine& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

/// One Box-Muller pair of independent standard normals.
inline void normal_pair(Engine& eng, double& a, double& b) {
  const double r = std::sqrt(-2.0 * std::log(uniform01_open(eng)));
  const double t = 6.283185307179586476925286766559 * uniform01(eng);
  a = r * std::cos(t);
  b = r * std::sin(t);
}

inline double normal01(Engine& eng) {
  double a, b;
  normal_pair(eng, a, b);
  return a;
}

inline void fill_normal(Engine& eng, std::span<double> out, double stddev = 1.0) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    double a, b;
    normal_pair(eng, a, b);
    out[i] = stddev * a;
    out[i + 1] = stddev * b;
  }
  if (i < out.size()) out[i] = stddev * normal01(eng);
}

/// Circularly symmetric complex Gaussian entries, total variance
/// `variance` per entry (so variance/2 per real component).
inline void fill_cscg(Engine& eng, std::span<std::complex<double>> out, double variance) {
  const double comp = std::sqrt(variance * 0.5);
  for (auto& z : out) {
    double a, b;
    normal_pair(eng, a, b);
    z = {comp * a, comp * b};
  }
}

}  // namespace rasgd::rng
