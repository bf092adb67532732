// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "mocha/conv.hpp"
#include "mocha/tensor.hpp"

namespace mocha::features {

/// Scale-4 matching features plus context at scales 4, 8 and 16.
struct FeatureSet {
  Tensor3 matching;                        ///< C_4 x H/4 x W/4
  std::map<std::uint8_t, Tensor3> context;  ///< keyed by scale divisor

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
};

struct EncoderConfig {
  std::uint64_t seed = 0;
  std::size_t stem_channels = 16;
  std::size_t channels4 = 32;
  std::size_t channels8 = 48;
  std::size_t channels16 = 64;
  std::size_t context_channels = 16;

  void validate() const;
};

/// Seeded stand-in for a pretrained backbone:
///
///   stem   3x3 s2  3 -> stem        relu      H/2
///   down4  3x3 s2  stem -> C4       relu      H/4
///   down8  3x3 s2  C4 -> C8         relu      H/8
///   down16 3x3 s2  C8 -> C16        relu      H/16
///   match  3x3 s1  C4 -> C4         (linear)  H/4
///   ctx_s  3x3 s1  C_s -> context   relu      H/s for s in {4, 8, 16}
class ToyEncoder {
 public:
  explicit ToyEncoder(const EncoderConfig& cfg);

  /// img is 3 x H x W with H, W >= 32 and divisible by 16.
  FeatureSet encode(const Tensor3& img) const;

  const EncoderConfig& config() const noexcept { return cfg_; }

 private:
  EncoderConfig cfg_;
  nn::Conv2d stem_, down4_, down8_, down16_, match_, ctx4_, ctx8_, ctx16_;
};

FeatureSet encode_toy(const Tensor3& img, const EncoderConfig& cfg);

/// Binary layout, all integers little-endian:
///   "MCFV"            4 bytes
///   version           u16 (= 1)
///   scale count       u8
///   per scale:        u8 divisor, u32 C, u32 H, u32 W,
///                     C*H*W float32 values, channel-major then row-major
/// The first entry is the matching tensor; later entries are context.
std::vector<std::uint8_t> serialize(const FeatureSet& fs);
FeatureSet deserialize(std::span<const std::uint8_t> bytes);

void save_features(const FeatureSet& fs, const std::filesystem::path& path);
FeatureSet load_features(const std::filesystem::path& path);

}  // namespace mocha::features
