#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qcmi {

/// Splittable pseudo-random source.
///
/// A generator is identified by (seed, stream). `derive(i)` returns the
/// independent child stream i, so parallel workers can reproduce exactly the
/// draws a sequential run would make for sample i. The engine is
/// std::mt19937_64, whose output sequence is fixed by the C++ standard; the
/// uniform and Gaussian transforms are implemented here rather than with the
/// implementation-defined std distributions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  SeededRng derive(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_zero();
  /// Standard normal via Box-Muller.
  double normal();
  /// Standard complex normal: E|z|^2 = 1.
  std::complex<double> complex_normal();
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qcmi
