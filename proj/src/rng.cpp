#include "qcmi/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcmi {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream))) {}

SeededRng SeededRng::derive(std::uint64_t index) const {
  // Child streams hash the parent stream and the index together, so derived
  // trees never collide with the flat (seed, index) streams in practice.
  return SeededRng(seed_, splitmix64(stream_ + 0x632BE59BD9B4E019ULL) ^ index);
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform_open_zero() { return 1.0 - uniform(); }

double SeededRng::normal() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> SeededRng::complex_normal() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  // Radius for a complex Gaussian with unit second moment.
  const double r = std::sqrt(-std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t SeededRng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return engine_();
  const std::uint64_t n = span + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + x % n;
}

}  // namespace qcmi
