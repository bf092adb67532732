// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::synthetic {

struct StereoPair {
  Tensor3 left;
  Tensor3 right;
  DisparityMap ground_truth;
};

/// Seeded smooth colour texture T(c, y, x) in [0, 1], defined for any real
/// x (a sum of a few random plane waves).
class Texture {
 public:
  explicit Texture(std::uint64_t seed, std::size_t channels = 3);
  float operator()(std::size_t c, double y, double x) const;

 private:
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::size_t channels_;
  std::vector<std::vector<Wave>> waves_;
};

/// Fronto-parallel textured plane at constant disparity: right(h, w) =
/// T(h, w), left(h, w) = T(h, w - disparity). Ground truth is `disparity`
/// everywhere.
StereoPair textured_plane(std::size_t height, std::size_t width, double disparity,
                          std::uint64_t seed);

}  // namespace mocha::synthetic
