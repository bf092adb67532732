// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mocha/random.hpp"
#include "mocha/tensor.hpp"

namespace mocha::nn {

/// 2-D convolution with square kernel, zero padding of kernel/2 and
/// double-precision accumulation. Each output element sums bias first, then
/// input channels, kernel rows and kernel columns in index order, so the
/// result does not depend on how output channels are spread over threads.
struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::vector<float> weight;  ///< [out][in][ky][kx]
  std::vector<float> bias;    ///< [out]

  Conv2d() = default;
  Conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride = 1);

  /// Uniform in [-b, b] with b = gain * sqrt(6 / fan_in); bias zero.
  static Conv2d seeded(SeededGenerator& gen, std::size_t in, std::size_t out,
                       std::size_t kernel, std::size_t stride = 1, double gain = 1.0);

  float& w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
    return weight[((o * in_channels + i) * kernel + ky) * kernel + kx];
  }
  float w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
    return weight[((o * in_channels + i) * kernel + ky) * kernel + kx];
  }

  std::size_t out_size(std::size_t in) const { return (in + stride - 1) / stride; }

  Tensor3 forward(const Tensor3& x) const;
  bool is_zero() const;
};

/// Single-channel 3x3x3 convolution over a (depth, height, width) volume
/// stored as a Tensor3, zero padded. `identity` bypasses the kernel.
struct VolumeConv {
  bool identity = true;
  std::array<float, 27> weight{};  ///< [dz][dy][dx]
  float bias = 0.0f;

  static VolumeConv make_identity() { return {}; }
  static VolumeConv seeded(SeededGenerator& gen, double gain = 1.0);

  Tensor3 forward(const Tensor3& volume) const;
};

void relu_inplace(Tensor3& x);
void sigmoid_inplace(Tensor3& x);
void tanh_inplace(Tensor3& x);

/// Logistic function, strictly inside (0, 1) in float.
float sigmoid(float v);
/// tanh, strictly inside (-1, 1) in float.
float bounded_tanh(float v);

}  // namespace mocha::nn
