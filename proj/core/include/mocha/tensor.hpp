// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mocha {

/// Single plane, row-major.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t height, std::size_t width, float fill = 0.0f);
  Tensor2(std::size_t height, std::size_t width, std::vector<float> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& operator()(std::size_t h, std::size_t w) { return data_[h * width_ + w]; }
  float operator()(std::size_t h, std::size_t w) const { return data_[h * width_ + w]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<float> row(std::size_t h) { return {data_.data() + h * width_, width_}; }
  std::span<const float> row(std::size_t h) const {
    return {data_.data() + h * width_, width_};
  }

  std::string shape_string() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> data_;
};

/// Channel-major stack of planes: index (c, h, w) at (c * H + h) * W + w.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t height, std::size_t width, float fill = 0.0f);
  Tensor3(std::size_t channels, std::size_t height, std::size_t width,
          std::vector<float> data);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& operator()(std::size_t c, std::size_t h, std::size_t w) {
    return data_[(c * height_ + h) * width_ + w];
  }
  float operator()(std::size_t c, std::size_t h, std::size_t w) const {
    return data_[(c * height_ + h) * width_ + w];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<float> plane(std::size_t c) {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<const float> plane(std::size_t c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  Tensor2 channel(std::size_t c) const;
  void set_channel(std::size_t c, const Tensor2& plane);

  std::string shape_string() const;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> data_;
};

/// out[c,h,w] = a[c,h,w] * b[c,h,w].
Tensor3 hadamard(const Tensor3& a, const Tensor3& b);
/// out[c,h,w] = a[c,h,w] * b[h,w]; b is broadcast over channels.
Tensor3 hadamard(const Tensor3& a, const Tensor2& b);

/// Stacks tensors along the channel axis. All parts must share H and W.
Tensor3 concat_channels(std::span<const Tensor3* const> parts);

/// Largest absolute value; 0 for an empty tensor.
double max_abs(std::span<const float> values);
bool all_finite(std::span<const float> values);

/// Bilinear resize by an integer factor with align_corners=false sampling
/// and edge clamping.
Tensor3 upsample_bilinear(const Tensor3& x, std::size_t factor);
/// Mean over non-overlapping factor x factor blocks. Dims must divide.
Tensor3 avg_pool(const Tensor3& x, std::size_t factor);

/// Per-pixel disparity with a validity mask.
struct DisparityMap {
  Tensor2 values;
  std::vector<unsigned char> valid;

  DisparityMap() = default;
  DisparityMap(std::size_t height, std::size_t width, float fill = 0.0f);
  explicit DisparityMap(Tensor2 v);

  std::size_t height() const noexcept { return values.height(); }
  std::size_t width() const noexcept { return values.width(); }
  bool is_valid(std::size_t h, std::size_t w) const {
    return valid[h * values.width() + w] != 0;
  }
};

}  // namespace mocha
