// SPDX-License-Identifier: Apache-2.0
#include "mocha/random.hpp"

#include <cmath>

#include "mocha/error.hpp"

namespace mocha {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededGenerator::next_u64() noexcept {
  ++counter_;
  return splitmix64_mix(seed_ + counter_ * kGolden);
}

double SeededGenerator::uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededGenerator::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform01();
}

double SeededGenerator::normal() noexcept {
  double acc = 0.0;
  for (int i = 0; i < 12; ++i) acc += uniform01();
  return acc - 6.0;
}

SeededGenerator SeededGenerator::fork(std::uint64_t stream) const noexcept {
  return SeededGenerator(splitmix64_mix(seed_ ^ splitmix64_mix(stream + kGolden)));
}

Tensor3 seeded_normal(SeededGenerator& gen, std::size_t channels, std::size_t height,
                      std::size_t width, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw PreconditionError("seeded_normal: scale must be positive and finite");
  }
  Tensor3 out(channels, height, width);
  for (float& v : out.data()) v = static_cast<float>(gen.normal() * scale);
  return out;
}

Tensor3 seeded_uniform(SeededGenerator& gen, std::size_t channels, std::size_t height,
                       std::size_t width, double bound) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw PreconditionError("seeded_uniform: bound must be non-negative and finite");
  }
  Tensor3 out(channels, height, width);
  for (float& v : out.data()) v = static_cast<float>(gen.uniform(-bound, bound));
  return out;
}

}  // namespace mocha
