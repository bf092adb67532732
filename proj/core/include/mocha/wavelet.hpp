// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::wavelet {

/// Orthonormal 2-D Haar analysis of one 2x2 block [[x00, x01], [x10, x11]]:
///
///   LL = (x00 + x01 + x10 + x11) / 2
///   HL = (x00 - x01 + x10 - x11) / 2   horizontal-frequency detail
///   LH = (x00 + x01 - x10 - x11) / 2   vertical-frequency detail
///   HH = (x00 - x01 - x10 + x11) / 2   diagonal detail
///
/// Odd inputs are padded right/bottom by edge replication before each level;
/// the pre-padding size is recorded so the inverse can crop.
enum class BandKind { LL, LH, HL, HH };

struct Level {
  Tensor2 lh, hl, hh;
  std::size_t in_height = 0;  ///< Input size of this level before padding.
  std::size_t in_width = 0;
};

struct WaveletPyramid {
  std::vector<Level> levels;  ///< levels[0] is the finest.
  Tensor2 ll;                 ///< Approximation after the last level.

  std::size_t level_count() const noexcept { return levels.size(); }
  std::size_t original_height() const { return levels.empty() ? ll.height() : levels[0].in_height; }
  std::size_t original_width() const { return levels.empty() ? ll.width() : levels[0].in_width; }
};

/// Identifies one subband: level is 1-based.
struct BandRef {
  std::size_t level;
  BandKind kind;
  friend bool operator==(const BandRef&, const BandRef&) = default;
};

/// Processing order for a pyramid of `levels` levels; for two levels this is
/// LH1, HL1, HH1, LL2, LH2, HL2, HH2.
std::vector<BandRef> band_order(std::size_t levels);
std::string band_name(const BandRef& ref);

Tensor2& band(WaveletPyramid& p, const BandRef& ref);
const Tensor2& band(const WaveletPyramid& p, const BandRef& ref);

WaveletPyramid dwt2(const Tensor2& x, std::size_t levels);
Tensor2 idwt2(const WaveletPyramid& p);

/// One pyramid per channel.
std::vector<WaveletPyramid> dwt3(const Tensor3& x, std::size_t levels);
Tensor3 idwt3(const std::vector<WaveletPyramid>& pyramids);

/// Sum of squared coefficients across all subbands.
double energy(const WaveletPyramid& p);

}  // namespace mocha::wavelet
