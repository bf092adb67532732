// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

#include "mocha/tensor.hpp"

namespace mocha {

/// Counter-based SplitMix64 stream.
///
/// The i-th raw draw (0-based) of a generator seeded with `s` is
/// `mix(s + (i + 1) * 0x9E3779B97F4A7C15)`, where `mix` is the SplitMix64
/// finalizer (xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift 27,
/// multiply 0x94D049BB133111EB, xor-shift 31). All arithmetic is modulo
/// 2^64, so every platform reproduces the same stream.
///
/// Derived draws:
///   uniform01  = (raw >> 11) * 2^-53                       in [0, 1)
///   normal     = sum of 12 uniform01 draws minus 6          (Irwin-Hall)
/// The Irwin-Hall construction has unit variance and support [-6, 6]; it
/// uses no transcendental functions, so it is bit-reproducible without
/// relying on a particular libm.
class SeededGenerator {
 public:
  explicit SeededGenerator(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  double uniform01() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Approximately standard normal (Irwin-Hall of order 12).
  double normal() noexcept;

  /// Independent generator for a named sub-stream.
  SeededGenerator fork(std::uint64_t stream) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Tensor of `normal() * scale` draws in storage order. scale must be > 0.
Tensor3 seeded_normal(SeededGenerator& gen, std::size_t channels, std::size_t height,
                      std::size_t width, double scale);

/// Tensor of uniform draws in [-bound, bound) in storage order.
Tensor3 seeded_uniform(SeededGenerator& gen, std::size_t channels, std::size_t height,
                       std::size_t width, double bound);

}  // namespace mocha
