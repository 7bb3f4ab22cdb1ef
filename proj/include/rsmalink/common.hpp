#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsmalink {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;

// Finite stand-in for an infinite log-likelihood ratio.  Kept finite so that
// sums and differences of saturated values (as produced by the g-step of a
// successive cancellation decoder on shortened positions) never yield NaN.
inline constexpr double kLlrSaturation = 1e9;

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }

// splitmix64: tiny, well-distributed 64-bit mixer.  Used only for seed
// derivation; the simulation RNG itself is std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic seed splitting.  A master seed plus a purpose tag plus an
// index gives an independent stream seed.  Same inputs always give the same
// seed, on every platform, so campaigns can be re-run piecewise (or in
// parallel) and merged without changing any result.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag bytes
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= h;
  std::uint64_t b = splitmix64(s);
  s ^= index * 0x9e3779b97f4a7c15ull;
  std::uint64_t c = splitmix64(s);
  return a ^ (b << 1) ^ c;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rsmalink
