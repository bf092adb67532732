// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mocha/conv.hpp"
#include "mocha/tensor.hpp"

namespace mocha::cost {

/// D x H x W x G matching scores; index ((d * H + h) * W + w) * G + g.
class GroupedVolume {
 public:
  GroupedVolume() = default;
  GroupedVolume(std::size_t D, std::size_t H, std::size_t W, std::size_t G, float fill = 0.0f)
      : D_(D), H_(H), W_(W), G_(G), data_(D * H * W * G, fill) {}

  std::size_t disparities() const noexcept { return D_; }
  std::size_t height() const noexcept { return H_; }
  std::size_t width() const noexcept { return W_; }
  std::size_t groups() const noexcept { return G_; }

  float& operator()(std::size_t d, std::size_t h, std::size_t w, std::size_t g) {
    return data_[((d * H_ + h) * W_ + w) * G_ + g];
  }
  float operator()(std::size_t d, std::size_t h, std::size_t w, std::size_t g) const {
    return data_[((d * H_ + h) * W_ + w) * G_ + g];
  }
  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const GroupedVolume& o) const {
    return D_ == o.D_ && H_ == o.H_ && W_ == o.W_ && G_ == o.G_;
  }
  friend bool operator==(const GroupedVolume&, const GroupedVolume&) = default;

 private:
  std::size_t D_ = 0, H_ = 0, W_ = 0, G_ = 0;
  std::vector<float> data_;
};

/// Grouped volumes and their combination. `combined` is D x H x W.
struct CorrelationVolume {
  GroupedVolume grouped;  ///< C_g
  GroupedVolume motif;    ///< C_c
  Tensor3 combined;       ///< C
};

/// Right-image column sampled for left column w at disparity d is w + sign*d.
/// sign = -1 is the usual left-reference convention.
struct CorrOptions {
  std::size_t max_disparity = 48;
  std::size_t groups = 8;
  int disparity_sign = -1;

  void validate(std::size_t channels) const;
};

/// C_g(d,h,w,g) = (G / N_c) Σ_{c in g} f_l[c,h,w] * f_r[c,h,w + sign*d],
/// out-of-frame samples contribute 0.
GroupedVolume group_corr(const Tensor3& f_l, const Tensor3& f_r, const CorrOptions& opt);

/// group_corr on features first passed through `conv`, applied to each
/// group's (channel, h, w) block with shared weights.
GroupedVolume motif_corr(const Tensor3& fmc_l, const Tensor3& fmc_r, const CorrOptions& opt,
                         const nn::VolumeConv& conv);

/// C(d,h,w) = Σ_g C_g(d,h,w,g) * C_c(d,h,w,g).
Tensor3 combine(const GroupedVolume& cg, const GroupedVolume& cc);

/// Soft-argmin: softmax of conv(C) along disparity, then the expectation of
/// the disparity index. Output lies in [0, D-1].
DisparityMap init_disparity(const Tensor3& combined, const nn::VolumeConv& conv);

/// Soft-argmin over precomputed logits (D x H x W).
DisparityMap soft_argmin(const Tensor3& logits);

/// (2r+1) x H x W samples of C at d_now + δ for δ in [-r, r], linearly
/// interpolated along disparity with the position clamped to [0, D-1].
Tensor3 corr_lookup(const Tensor3& combined, const DisparityMap& d_now, std::size_t radius);

/// Raw dump: eight little-endian u32 header words
///   "MCVV", D, H, W, G, flags, 0, 0
/// followed by float32 values in storage order. flags bit 0 is set for a
/// grouped volume (D x H x W x G); a combined volume has G = 1, flags = 0.
std::vector<std::uint8_t> serialize_volume(const GroupedVolume& v);
std::vector<std::uint8_t> serialize_volume(const Tensor3& combined);
void dump_volume(const std::filesystem::path& path, const GroupedVolume& v);
void dump_volume(const std::filesystem::path& path, const Tensor3& combined);

}  // namespace mocha::cost
