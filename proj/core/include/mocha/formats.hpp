// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mocha/tensor.hpp"

namespace mocha::formats {

/// Grayscale PFM ("Pf"). Rows are stored bottom-to-top on disk and
/// top-to-bottom in memory. Both byte orders are read; writes are always
/// little-endian (scale -1.0). Sample bits are copied verbatim, NaN
/// payloads included. Non-finite samples are marked invalid.
DisparityMap read_pfm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pfm(const Tensor2& d);
std::vector<std::uint8_t> write_pfm(const DisparityMap& d);

/// Binary PGM (P5, 1 channel) or PPM (P6, 3 channels), maxval <= 255.
/// Samples are scaled to [0, 1] on read.
struct PnmImage {
  Tensor3 pixels;
  unsigned maxval = 255;
};
PnmImage read_pnm(std::span<const std::uint8_t> bytes);
/// Quantizes round(v * maxval) after clamping v to [0, 1]. One channel
/// writes P5, three write P6.
std::vector<std::uint8_t> write_pnm(const Tensor3& img, unsigned maxval = 255);

/// Colour ramp for disparity visualisation: piecewise linear through
///   (0, 0, 0.5) (0, 0, 1) (0, 1, 1) (1, 1, 0) (1, 0, 0) (0.5, 0, 0)
/// at d / max_d = 0, 0.2, 0.4, 0.6, 0.8, 1 (clamped). Invalid pixels are
/// black.
Tensor3 colorize_disparity(const DisparityMap& d, double max_d);

DisparityMap load_pfm(const std::filesystem::path& path);
void save_pfm(const std::filesystem::path& path, const DisparityMap& d);
PnmImage load_pnm(const std::filesystem::path& path);
void save_pnm(const std::filesystem::path& path, const Tensor3& img, unsigned maxval = 255);

}  // namespace mocha::formats
