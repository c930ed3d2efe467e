// SPDX-License-Identifier: Apache-2.0
//
// Seeded random stream with hand-rolled distributions. std::* distributions
// are implementation-defined, so every draw here is produced by our own code
// on top of the standard-pinned mt19937_64 bit stream; identical seeds give
// identical samples on any conforming platform.
#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace l2ora {

// splitmix64 finalizer; used to derive independent per-index seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Marsaglia's polar method (second value cached).
  double normal();

  // Gamma(shape k, scale theta), Marsaglia-Tsang; k < 1 boosted through
  // Gamma(k + 1) and a uniform power. Throws std::invalid_argument on
  // non-positive parameters.
  double gamma(double shape, double scale);

  // One complex Nakagami-m fading coefficient with E[|entry|^2] = omega:
  // envelope sqrt(Gamma(m, omega/m)), phase uniform on [0, 2*pi).
  // Throws std::invalid_argument if m < 0.5 or omega <= 0.
  std::pair<double, double> nakagami_entry(double m, double omega);

 private:
  double uniform_nonzero() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace l2ora
