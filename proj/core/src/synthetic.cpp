// SPDX-License-Identifier: Apache-2.0
#include "mocha/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mocha/random.hpp"

namespace mocha::synthetic {

Texture::Texture(std::uint64_t seed, std::size_t channels) : channels_(channels) {
  SeededGenerator gen(seed);
  constexpr std::size_t kWaves = 6;
  waves_.resize(channels);
  for (auto& ws : waves_) {
    for (std::size_t k = 0; k < kWaves; ++k) {
      // Periods between roughly 4 and 40 pixels in each direction.
      const double fx = gen.uniform(0.15, 1.5) * (gen.uniform01() < 0.5 ? -1.0 : 1.0);
      const double fy = gen.uniform(0.05, 0.8) * (gen.uniform01() < 0.5 ? -1.0 : 1.0);
      ws.push_back({fx, fy, gen.uniform(0.0, 2.0 * std::numbers::pi), gen.uniform(0.05, 0.15)});
    }
  }
}

float Texture::operator()(std::size_t c, double y, double x) const {
  double v = 0.5;
  for (const Wave& w : waves_[c % channels_]) v += w.amp * std::sin(w.fx * x + w.fy * y + w.phase);
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

StereoPair textured_plane(std::size_t height, std::size_t width, double disparity,
                          std::uint64_t seed) {
  const Texture tex(seed, 3);
  StereoPair p{Tensor3(3, height, width), Tensor3(3, height, width),
               DisparityMap(height, width, static_cast<float>(disparity))};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t h = 0; h < height; ++h) {
      for (std::size_t w = 0; w < width; ++w) {
        const auto y = static_cast<double>(h), x = static_cast<double>(w);
        p.right(c, h, w) = tex(c, y, x);
        p.left(c, h, w) = tex(c, y, x - disparity);
      }
    }
  }
  return p;
}

}  // namespace mocha::synthetic
