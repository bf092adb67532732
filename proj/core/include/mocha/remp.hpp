// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mocha/conv.hpp"
#include "mocha/motif_graph.hpp"
#include "mocha/tensor.hpp"

namespace mocha::remp {

/// Two-view geometry. R and T map right-camera coordinates to the left
/// camera; N is the plane normal in the right camera frame.
struct CameraRig {
  Eigen::Matrix3d K_l = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d K_r = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d T = Eigen::Vector3d::Zero();
  Eigen::Vector3d N = Eigen::Vector3d(0, 0, 1);
  double focal = 1.0;     ///< pixels
  double baseline = 1.0;  ///< metres

  /// Identical pinhole cameras, R = I, T = (-B, 0, 0), N = (0, 0, 1).
  static CameraRig rectified(double focal, double cx, double cy, double baseline);

  void validate() const;
  /// Plane distance for a disparity in pixels: focal * baseline / d.
  double depth_from_disparity(double d) const { return focal * baseline / d; }
};

/// H = K_l (R - T N^T / D) K_r^{-1}; D in metres, D > 0.
Eigen::Matrix3d plane_homography(const CameraRig& rig, double depth);
/// Limit D -> infinity: K_l R K_r^{-1}.
Eigen::Matrix3d plane_homography_at_infinity(const CameraRig& rig);

enum class WarpMode { Rectified, Homography };

struct ReconOptions {
  WarpMode mode = WarpMode::Rectified;
  int disparity_sign = -1;  ///< Rectified mode samples I_r at w + sign * d.
  std::optional<CameraRig> rig;  ///< Required for Homography mode.
};

/// E(c,h,w) = warp(I_r)(c,h,w) - I_l(c,h,w), zero where the warp leaves the
/// frame; `valid` marks in-frame samples (1) per pixel.
struct ReconError {
  Tensor3 error;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const;
};

/// Homography mode samples I_r at H^{-1} (w, h, 1) with a per-pixel plane
/// depth from d; d <= 0 uses the infinite-depth homography.
ReconError recon_error(const Tensor3& I_l, const Tensor3& I_r, const DisparityMap& d,
                       const ReconOptions& opt = {});

/// Bilinear x factor upsampling of a disparity map with values scaled by
/// the same factor.
DisparityMap upsample_disparity(const DisparityMap& d, std::size_t factor);

/// Seeded weights of the full-resolution refinement network.
///
///   encoder-decoder  (1 + C) -> 8 -> s2 16 -> s2 32 -> up 16 (+skip) -> up 8 (+skip) = o
///   LFE(o) = σ(conv(relu(conv(avgpool2(o))))), nearest x2 back to full size
///   LMC(o) = σ(mcga_apply(o))
///   HFE(o) = o ⊙ LMC(o)
///   d      = d_up - head(LFE ⊙ (1 - LMC) + HFE)
struct RempWeights {
  std::size_t image_channels = 3;
  std::size_t width = 8;  ///< channels of o
  nn::Conv2d enc0, down1, down2, up1, up2;
  nn::Conv2d lfe1, lfe2;
  nn::Conv2d head;  ///< 3x3, width -> 1
  motif::McgaConfig lmc;

  static RempWeights seeded(std::uint64_t seed, std::size_t image_channels,
                            motif::Normalization norm = motif::Normalization::PaperNc);
  /// Same network with every head weight and bias zero.
  RempWeights with_zero_head() const;
};

/// Intermediate maps, exposed for invariant checks.
struct RempTrace {
  Tensor3 o, lfe, lmc, hfe;
  Tensor2 penalty;
};

DisparityMap remp_refine(const DisparityMap& d_up, const ReconError& E, const RempWeights& w,
                         RempTrace* trace = nullptr);

}  // namespace mocha::remp
